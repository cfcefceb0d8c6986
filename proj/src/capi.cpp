#include "eigenobs.h"

#include <cstring>
#include <memory>
#include <string>

#include "core/experiments.hpp"

using namespace eigenobs;

namespace {

thread_local std::string t_last_error;

eigenobs_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return EIGENOBS_ERR_ARGUMENT;
    case ErrorKind::Range: return EIGENOBS_ERR_RANGE;
    case ErrorKind::Config: return EIGENOBS_ERR_CONFIG;
    case ErrorKind::Numeric: return EIGENOBS_ERR_NUMERIC;
    case ErrorKind::Resource: return EIGENOBS_ERR_RESOURCE;
    case ErrorKind::Unsupported: return EIGENOBS_ERR_UNSUPPORTED;
  }
  return EIGENOBS_ERR_INTERNAL;
}

template <typename Fn>
eigenobs_status guarded(Fn&& fn) {
  try {
    fn();
    return EIGENOBS_OK;
  } catch (const Error& e) {
    t_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return EIGENOBS_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown failure";
    return EIGENOBS_ERR_INTERNAL;
  }
}

eigenobs_status bad_argument(const char* msg) {
  t_last_error = msg;
  return EIGENOBS_ERR_ARGUMENT;
}

}  // namespace

struct eigenobs_domain {
  Domain domain;
};

struct eigenobs_mesh {
  Mesh mesh;
};

struct eigenobs_obstacle {
  ObstacleRegion region;
};

extern "C" {

const char* eigenobs_version(void) { return "0.1.0"; }

const char* eigenobs_last_error(void) { return t_last_error.c_str(); }

eigenobs_status eigenobs_domain_create_disk(double radius,
                                            eigenobs_domain** out) {
  if (!out) return bad_argument("null out pointer");
  return guarded([&] { *out = new eigenobs_domain{Domain::disk(radius)}; });
}

eigenobs_status eigenobs_domain_create_ellipse(double a, double b,
                                               eigenobs_domain** out) {
  if (!out) return bad_argument("null out pointer");
  return guarded([&] { *out = new eigenobs_domain{Domain::ellipse(a, b)}; });
}

eigenobs_status eigenobs_domain_create_square(double side,
                                              eigenobs_domain** out) {
  if (!out) return bad_argument("null out pointer");
  return guarded([&] { *out = new eigenobs_domain{Domain::square(side)}; });
}

void eigenobs_domain_destroy(eigenobs_domain* domain) { delete domain; }

eigenobs_status eigenobs_domain_area(const eigenobs_domain* domain,
                                     double* out) {
  if (!domain || !out) return bad_argument("null pointer");
  return guarded([&] { *out = domain->domain.area(); });
}

eigenobs_status eigenobs_domain_boundary_length(const eigenobs_domain* domain,
                                                double* out) {
  if (!domain || !out) return bad_argument("null pointer");
  return guarded([&] { *out = domain->domain.boundary_length(); });
}

eigenobs_status eigenobs_domain_inradius(const eigenobs_domain* domain,
                                         double* out) {
  if (!domain || !out) return bad_argument("null pointer");
  return guarded([&] { *out = domain->domain.inradius(); });
}

eigenobs_status eigenobs_domain_faber_krahn_threshold(
    const eigenobs_domain* domain, double* out) {
  if (!domain || !out) return bad_argument("null pointer");
  return guarded([&] { *out = domain->domain.faber_krahn_threshold(); });
}

eigenobs_status eigenobs_domain_boundary_point(const eigenobs_domain* domain,
                                               double s, double position[2],
                                               double normal[2],
                                               double tangent[2]) {
  if (!domain) return bad_argument("null pointer");
  return guarded([&] {
    const BoundaryPoint bp = domain->domain.boundary_point(s);
    if (position) {
      position[0] = bp.position.x;
      position[1] = bp.position.y;
    }
    if (normal) {
      normal[0] = bp.normal.x;
      normal[1] = bp.normal.y;
    }
    if (tangent) {
      tangent[0] = bp.tangent.x;
      tangent[1] = bp.tangent.y;
    }
  });
}

eigenobs_status eigenobs_mesh_create(const eigenobs_domain* domain, double h,
                                     eigenobs_mesh** out) {
  if (!domain || !out) return bad_argument("null pointer");
  return guarded(
      [&] { *out = new eigenobs_mesh{triangulate(domain->domain, h)}; });
}

eigenobs_status eigenobs_mesh_refine(const eigenobs_mesh* mesh,
                                     eigenobs_mesh** out) {
  if (!mesh || !out) return bad_argument("null pointer");
  return guarded([&] { *out = new eigenobs_mesh{refine(mesh->mesh)}; });
}

void eigenobs_mesh_destroy(eigenobs_mesh* mesh) { delete mesh; }

eigenobs_status eigenobs_mesh_counts(const eigenobs_mesh* mesh, int* vertices,
                                     int* triangles) {
  if (!mesh) return bad_argument("null pointer");
  return guarded([&] {
    if (vertices) *vertices = mesh->mesh.vertex_count();
    if (triangles) *triangles = mesh->mesh.triangle_count();
  });
}

eigenobs_status eigenobs_mesh_write_text(const eigenobs_mesh* mesh,
                                         const char* path) {
  if (!mesh || !path) return bad_argument("null pointer");
  return guarded([&] { write_text_file(path, mesh->mesh.write_text()); });
}

eigenobs_status eigenobs_obstacle_create_bump(const eigenobs_domain* domain,
                                              double anchor_s, double width,
                                              double eps, const char* profile,
                                              eigenobs_obstacle** out) {
  if (!domain || !out) return bad_argument("null pointer");
  return guarded([&] {
    StraighteningMap map(domain->domain, anchor_s);
    BumpObstacleSpec spec;
    spec.anchor_s = anchor_s;
    spec.width = width;
    spec.profile = BumpProfile::by_name(profile ? profile : "cos2");
    spec.target_volume = eps;
    *out = new eigenobs_obstacle{ObstacleRegion::bump(spec, map)};
  });
}

void eigenobs_obstacle_destroy(eigenobs_obstacle* obstacle) { delete obstacle; }

eigenobs_status eigenobs_obstacle_volume(const eigenobs_obstacle* obstacle,
                                         double* out) {
  if (!obstacle || !out) return bad_argument("null pointer");
  return guarded([&] { *out = obstacle->region.volume(); });
}

eigenobs_status eigenobs_obstacle_contains(const eigenobs_obstacle* obstacle,
                                           double x, double y, int* out) {
  if (!obstacle || !out) return bad_argument("null pointer");
  return guarded(
      [&] { *out = obstacle->region.contains({x, y}) ? 1 : 0; });
}

eigenobs_status eigenobs_obstacle_json(const eigenobs_obstacle* obstacle,
                                       char* buffer, size_t size,
                                       size_t* needed) {
  if (!obstacle) return bad_argument("null pointer");
  return guarded([&] {
    const std::string j = obstacle->region.to_json();
    if (needed) *needed = j.size() + 1;
    if (buffer && size > 0) {
      const size_t n = std::min(size - 1, j.size());
      std::memcpy(buffer, j.data(), n);
      buffer[n] = '\0';
    }
  });
}

eigenobs_status eigenobs_solve_lambda0(const eigenobs_mesh* mesh, double tol,
                                       eigenobs_eigen_result* out) {
  if (!mesh || !out) return bad_argument("null pointer");
  return guarded([&] {
    const SparseSym K = assemble_stiffness(mesh->mesh);
    const SparseSym M = assemble_mass(mesh->mesh);
    const EigenPair pair = smallest_eigenpair(K, M, outer_mask(mesh->mesh), tol);
    out->lambda = pair.lambda;
    out->residual = pair.residual;
    out->iterations = pair.iterations;
  });
}

eigenobs_status eigenobs_solve_with_obstacle(const eigenobs_mesh* mesh,
                                             const eigenobs_obstacle* obstacle,
                                             double tol,
                                             eigenobs_eigen_result* out,
                                             double* capacity) {
  if (!mesh || !obstacle || !out) return bad_argument("null pointer");
  return guarded([&] {
    const auto cls = classify_nodes(mesh->mesh, obstacle->region);
    const auto mask = constrained_mask(mesh->mesh, cls);
    const SparseSym K = assemble_stiffness(mesh->mesh);
    const SparseSym M = assemble_mass(mesh->mesh);
    const EigenPair pair = smallest_eigenpair(K, M, mask, tol);
    out->lambda = pair.lambda;
    out->residual = pair.residual;
    out->iterations = pair.iterations;
    if (capacity) {
      const EigenPair base =
          smallest_eigenpair(K, M, outer_mask(mesh->mesh), tol);
      *capacity = relative_capacity(mesh->mesh, cls, K, base.field).capacity;
    }
  });
}

eigenobs_status eigenobs_boundary_gradient_min(const eigenobs_mesh* mesh,
                                               double tol, double* out) {
  if (!mesh || !out) return bad_argument("null pointer");
  return guarded([&] {
    const SparseSym K = assemble_stiffness(mesh->mesh);
    const SparseSym M = assemble_mass(mesh->mesh);
    const EigenPair pair = smallest_eigenpair(K, M, outer_mask(mesh->mesh), tol);
    *out = boundary_gradient(pair, mesh->mesh).min_value;
  });
}

eigenobs_status eigenobs_run_command(const char* command,
                                     const char* config_path,
                                     const char* outdir,
                                     eigenobs_run_report* report) {
  if (!command || !config_path) return bad_argument("null pointer");
  return guarded([&] {
    const std::string cmd = command;
    const ConfigFile cfg_file = ConfigFile::load(config_path);
    const bool needs_sweep = cmd == "sweep";
    const ExperimentConfig cfg = ExperimentConfig::from(cfg_file, needs_sweep);
    const std::string dir = outdir && *outdir ? outdir : cfg.outdir;
    int evaluated = 0, failed = 0;
    if (cmd == "solve") {
      run_solve(cfg, dir);
    } else if (cmd == "capacity") {
      run_capacity(cfg, dir);
    } else if (cmd == "optimize") {
      run_optimize(cfg, dir);
    } else if (cmd == "sweep") {
      const SweepResult res = run_sweep(cfg, dir);
      for (const auto& c : res.check_outcomes) {
        ++evaluated;
        if (!c.pass) ++failed;
      }
    } else if (cmd == "validate") {
      const ValidateOutcome res = run_validate(cfg, dir);
      for (const auto& e : res.entries) {
        ++evaluated;
        if (!e.pass) ++failed;
      }
    } else {
      fail(ErrorKind::Argument, "unknown command '" + cmd + "'");
    }
    if (report) {
      report->checks_evaluated = evaluated;
      report->checks_failed = failed;
    }
  });
}

}  // extern "C"
