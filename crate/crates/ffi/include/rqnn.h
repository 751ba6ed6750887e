#ifndef RQNN_H
#define RQNN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum RqnnStatus {
  RQNN_STATUS_OK = 0,
  RQNN_STATUS_NULL_POINTER = 1,
  RQNN_STATUS_INVALID_ARGUMENT = 2,
  RQNN_STATUS_SHAPE_MISMATCH = 3,
  /**
   * A vector or quaternion was too close to zero to define a direction.
   */
  RQNN_STATUS_DEGENERATE = 4,
  /**
   * A Rust panic was caught at the boundary.
   */
  RQNN_STATUS_PANIC = 5,
} RqnnStatus;

typedef enum RqnnMode {
  /**
   * Neurons compute the sum of weight times input plus bias.
   */
  RQNN_MODE_RQNN = 0,
  /**
   * Neurons compute the sum of input times weight plus bias.
   */
  RQNN_MODE_QNN = 1,
  RQNN_MODE_REAL = 2,
} RqnnMode;

typedef enum RqnnActivation {
  RQNN_ACTIVATION_SIGMOID = 0,
  RQNN_ACTIVATION_IDENTITY = 1,
} RqnnActivation;

typedef enum RqnnInit {
  /**
   * Uniform on `[-L, L]` with `L = sqrt(6 / (fan_in + fan_out))`, zero biases.
   */
  RQNN_INIT_XAVIER = 0,
  /**
   * Every component uniform on `[lo, hi)`.
   */
  RQNN_INIT_UNIFORM = 1,
} RqnnInit;

/**
 * Opaque network handle.
 */
typedef struct RqnnNetwork RqnnNetwork;

typedef struct RqnnQuaternion {
  double a;
  double b;
  double c;
  double d;
} RqnnQuaternion;

/**
 * Radians.
 */
typedef struct RqnnEuler {
  double roll;
  double pitch;
  double yaw;
} RqnnEuler;

/**
 * Builds a network with layer widths `widths[0..n_widths]` (at least two).
 * Hidden layers use `hidden`, the last layer uses `output`. The layer at
 * index `k` draws its initial values from stream `k` of `seed`.
 *
 * # Safety
 * `widths` must point to `n_widths` values and `out` must be writable.
 */
enum RqnnStatus rqnn_network_new(enum RqnnMode mode,
                                 const size_t *widths,
                                 size_t n_widths,
                                 enum RqnnActivation hidden,
                                 enum RqnnActivation output,
                                 enum RqnnInit init,
                                 double lo,
                                 double hi,
                                 uint64_t seed,
                                 struct RqnnNetwork **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `net` must be null or a handle not yet freed.
 */
void rqnn_network_free(struct RqnnNetwork *net);

/**
 * Copies the network (same mode and parameters) into `*out`.
 *
 * # Safety
 * `net` must be a live handle and `out` writable.
 */
enum RqnnStatus rqnn_network_clone(const struct RqnnNetwork *net, struct RqnnNetwork **out);

/**
 * Same parameters, other quaternion ordering.
 *
 * # Safety
 * `net` must be a live handle.
 */
enum RqnnStatus rqnn_network_set_mode(struct RqnnNetwork *net, enum RqnnMode mode);

/**
 * Number of real parameters, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t rqnn_network_param_count(const struct RqnnNetwork *net);

/**
 * Number of doubles in an input buffer, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t rqnn_network_input_len(const struct RqnnNetwork *net);

/**
 * Number of doubles in an output buffer, or 0 for a null handle.
 *
 * # Safety
 * `net` must be null or a live handle.
 */
size_t rqnn_network_output_len(const struct RqnnNetwork *net);

/**
 * # Safety
 * `input` and `output` must hold `n_input` and `n_output` doubles.
 */
enum RqnnStatus rqnn_network_forward(const struct RqnnNetwork *net,
                                     const double *input,
                                     size_t n_input,
                                     double *output,
                                     size_t n_output);

/**
 * One steepest-descent update on a single pattern. `loss_before`, when not
 * null, receives the pattern loss before the update.
 *
 * # Safety
 * Buffers must hold the stated counts; `loss_before` may be null.
 */
enum RqnnStatus rqnn_network_train_step(struct RqnnNetwork *net,
                                        const double *input,
                                        size_t n_input,
                                        const double *target,
                                        size_t n_target,
                                        double learning_rate,
                                        double *loss_before);

/**
 * Copies all parameters (weights then biases, layer by layer).
 *
 * # Safety
 * `out` must hold `n` doubles, `n == rqnn_network_param_count(net)`.
 */
enum RqnnStatus rqnn_network_get_params(const struct RqnnNetwork *net, double *out, size_t n);

/**
 * # Safety
 * `values` must hold `n` doubles.
 */
enum RqnnStatus rqnn_network_set_params(struct RqnnNetwork *net, const double *values, size_t n);

struct RqnnQuaternion rqnn_hamilton_product(struct RqnnQuaternion p, struct RqnnQuaternion r);

struct RqnnQuaternion rqnn_conjugate(struct RqnnQuaternion p);

double rqnn_norm(struct RqnnQuaternion p);

/**
 * Roll, pitch and yaw of the rotation `p` (normalized first).
 *
 * # Safety
 * `out` must be writable.
 */
enum RqnnStatus rqnn_to_euler(struct RqnnQuaternion p, struct RqnnEuler *out);

/**
 * Unit quaternion rotating direction `v1` onto `v2` (3 doubles each).
 *
 * # Safety
 * `v1`, `v2` must hold 3 doubles; `out` must be writable.
 */
enum RqnnStatus rqnn_rotation_between(const double *v1,
                                      const double *v2,
                                      struct RqnnQuaternion *out);

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *rqnn_last_error(void);

/**
 * Library version, static storage.
 */
const char *rqnn_version(void);

#endif  /* RQNN_H */
