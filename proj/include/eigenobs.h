/*
 * eigenobs -- shared-library interface for the obstacle-placement
 * eigenvalue laboratory.
 *
 * All functions operate through opaque handles and return a status code;
 * out-parameters are written only on EIGENOBS_OK. A human-readable message
 * for the last failing call on the current thread is available through
 * eigenobs_last_error().
 */
#ifndef EIGENOBS_H
#define EIGENOBS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eigenobs_status {
  EIGENOBS_OK = 0,
  EIGENOBS_ERR_ARGUMENT = 1,    /* bad argument / precondition violated */
  EIGENOBS_ERR_RANGE = 2,       /* requested value outside reachable range */
  EIGENOBS_ERR_CONFIG = 3,      /* malformed configuration file */
  EIGENOBS_ERR_NUMERIC = 4,     /* solver failure, non-finite values */
  EIGENOBS_ERR_RESOURCE = 5,    /* memory / size budget exceeded, io */
  EIGENOBS_ERR_UNSUPPORTED = 6, /* operation unavailable for this input */
  EIGENOBS_ERR_INTERNAL = 7
} eigenobs_status;

const char* eigenobs_version(void);
const char* eigenobs_last_error(void);

/* ------------------------------------------------------------------ */
/* domains                                                            */

typedef struct eigenobs_domain eigenobs_domain;

eigenobs_status eigenobs_domain_create_disk(double radius,
                                            eigenobs_domain** out);
eigenobs_status eigenobs_domain_create_ellipse(double a, double b,
                                               eigenobs_domain** out);
eigenobs_status eigenobs_domain_create_square(double side,
                                              eigenobs_domain** out);
void eigenobs_domain_destroy(eigenobs_domain* domain);

eigenobs_status eigenobs_domain_area(const eigenobs_domain* domain,
                                     double* out);
eigenobs_status eigenobs_domain_boundary_length(const eigenobs_domain* domain,
                                                double* out);
eigenobs_status eigenobs_domain_inradius(const eigenobs_domain* domain,
                                         double* out);
eigenobs_status eigenobs_domain_faber_krahn_threshold(
    const eigenobs_domain* domain, double* out);
/* position, unit outward normal and unit tangent at arc parameter s */
eigenobs_status eigenobs_domain_boundary_point(const eigenobs_domain* domain,
                                               double s, double position[2],
                                               double normal[2],
                                               double tangent[2]);

/* ------------------------------------------------------------------ */
/* meshes                                                             */

typedef struct eigenobs_mesh eigenobs_mesh;

eigenobs_status eigenobs_mesh_create(const eigenobs_domain* domain, double h,
                                     eigenobs_mesh** out);
eigenobs_status eigenobs_mesh_refine(const eigenobs_mesh* mesh,
                                     eigenobs_mesh** out);
void eigenobs_mesh_destroy(eigenobs_mesh* mesh);
eigenobs_status eigenobs_mesh_counts(const eigenobs_mesh* mesh, int* vertices,
                                     int* triangles);
/* "mesh v1" text format */
eigenobs_status eigenobs_mesh_write_text(const eigenobs_mesh* mesh,
                                         const char* path);

/* ------------------------------------------------------------------ */
/* obstacles and solves                                               */

typedef struct eigenobs_obstacle eigenobs_obstacle;

/* parametric boundary bump of prescribed volume eps anchored at arc
 * parameter anchor_s; profile is "cos2" or "poly4" (NULL means cos2) */
eigenobs_status eigenobs_obstacle_create_bump(const eigenobs_domain* domain,
                                              double anchor_s, double width,
                                              double eps, const char* profile,
                                              eigenobs_obstacle** out);
void eigenobs_obstacle_destroy(eigenobs_obstacle* obstacle);
eigenobs_status eigenobs_obstacle_volume(const eigenobs_obstacle* obstacle,
                                         double* out);
eigenobs_status eigenobs_obstacle_contains(const eigenobs_obstacle* obstacle,
                                           double x, double y, int* out);
/* JSON record {type, params, volume, boundary_samples}; writes the needed
 * byte count (incl. terminator) to *needed and fills buffer when large
 * enough */
eigenobs_status eigenobs_obstacle_json(const eigenobs_obstacle* obstacle,
                                       char* buffer, size_t size,
                                       size_t* needed);

typedef struct eigenobs_eigen_result {
  double lambda;
  double residual;
  int iterations;
} eigenobs_eigen_result;

/* first Dirichlet eigenvalue of the meshed domain */
eigenobs_status eigenobs_solve_lambda0(const eigenobs_mesh* mesh, double tol,
                                       eigenobs_eigen_result* out);
/* eigenvalue with the obstacle removed, plus the relative capacity of the
 * obstacle vertex set (capacity may be NULL) */
eigenobs_status eigenobs_solve_with_obstacle(const eigenobs_mesh* mesh,
                                             const eigenobs_obstacle* obstacle,
                                             double tol,
                                             eigenobs_eigen_result* out,
                                             double* capacity);
/* minimum of the boundary normal-derivative profile of the ground state */
eigenobs_status eigenobs_boundary_gradient_min(const eigenobs_mesh* mesh,
                                               double tol, double* out);

/* ------------------------------------------------------------------ */
/* config-driven commands                                             */

typedef struct eigenobs_run_report {
  int checks_evaluated;
  int checks_failed;
} eigenobs_run_report;

/* command is one of "solve", "capacity", "optimize", "sweep", "validate";
 * outdir overrides the config's [output] dir when non-NULL; report may be
 * NULL. Outputs (sweep.csv, profile.csv, summary.json, ...) land in the
 * output directory. */
eigenobs_status eigenobs_run_command(const char* command,
                                     const char* config_path,
                                     const char* outdir,
                                     eigenobs_run_report* report);

#ifdef __cplusplus
}
#endif

#endif /* EIGENOBS_H */
