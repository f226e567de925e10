#ifndef FEBE_H
#define FEBE_H

/* Generated by cbindgen. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Gate-decomposition model used when counting T gates.
typedef enum FebeCostModel {
  FEBE_COST_MODEL_AND_GADGET4_T = 0,
  FEBE_COST_MODEL_DETERMINISTIC7_T = 1,
} FebeCostModel;

// Result code of every fallible call.
typedef enum FebeStatus {
  FEBE_STATUS_OK = 0,
  FEBE_STATUS_NULL_POINTER = 1,
  FEBE_STATUS_INVALID_ARGUMENT = 2,
  FEBE_STATUS_INVALID_UTF8 = 3,
  FEBE_STATUS_SIZE_CAP = 4,
  FEBE_STATUS_PARSE = 5,
  FEBE_STATUS_NOT_HERMITIAN = 6,
  FEBE_STATUS_IO = 7,
  FEBE_STATUS_INTERNAL = 99,
} FebeStatus;

// Opaque compiled block encoding together with the spec it came from.
typedef struct FebeEncoding FebeEncoding;

// Opaque Hamiltonian specification.
typedef struct FebeSpec FebeSpec;

// Encoder knobs. Zero in `lambda`, `eta` or `m` means "not set":
// λ is then chosen by the cost model, and η or M must not be needed
// by the class.
typedef struct FebeEncodeOptions {
  uint32_t m_b;
  uint32_t lambda;
  uint32_t eta;
  uint32_t m;
  // Non-zero selects open boundaries for neighbor classes.
  uint8_t open_boundary;
} FebeEncodeOptions;

typedef struct FebeResources {
  uint64_t t_count;
  uint64_t t_depth;
  uint64_t clifford_count;
  uint64_t toffoli_count;
  uint64_t qubit_count;
  uint64_t ancilla_high_water;
} FebeResources;

typedef struct FebeVerifyReport {
  double max_abs_dev;
  double fro_dev;
  double alpha;
  double eps_bound;
  uint64_t columns_checked;
  uint8_t pass;
} FebeVerifyReport;

typedef struct FebeSelectSwapCost {
  double qubits;
  double t_count;
  double t_depth;
} FebeSelectSwapCost;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Error message of the most recent call on this thread, empty when that
// call succeeded. The pointer stays valid until the next call on the same
// thread.
const char *febe_last_error(void);

// Library version as a static NUL-terminated string.
const char *febe_version(void);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void febe_string_free(char *s);

// Parses a Hamiltonian spec document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum FebeStatus febe_spec_from_json(const char *json, struct FebeSpec **out);

// Generates a Hubbard chain with hopping `t` and on-site term `u` on `n` modes.
//
// # Safety
// `out` must be a writable pointer.
enum FebeStatus febe_spec_hubbard(uint32_t n, double t, double u, struct FebeSpec **out);

// Serializes a spec to its JSON document. Free the result with [`febe_string_free`].
//
// # Safety
// `spec` must be a live handle and `out` a writable pointer.
enum FebeStatus febe_spec_to_json(const struct FebeSpec *spec, char **out);

// # Safety
// `spec` must be NULL or a handle from this library and not yet freed.
void febe_spec_free(struct FebeSpec *spec);

// Options with the library defaults: 5-bit words, automatic λ, torus boundary.
struct FebeEncodeOptions febe_encode_options_default(void);

// Compiles `spec` with the encoder named by `class_name` (for example
// `"one-body"` or `"eta-number"`). `opts` may be NULL for defaults.
//
// # Safety
// `spec` must be a live handle, `class_name` a NUL-terminated string, `opts`
// NULL or readable, and `out` a writable pointer.
enum FebeStatus febe_encode(const struct FebeSpec *spec,
                            const char *class_name,
                            const struct FebeEncodeOptions *opts,
                            struct FebeEncoding **out);

// # Safety
// `enc` must be NULL or a handle from this library and not yet freed.
void febe_encoding_free(struct FebeEncoding *enc);

// Subnormalization α of the encoding.
//
// # Safety
// `enc` must be a live handle and `out` a writable pointer.
enum FebeStatus febe_encoding_alpha(const struct FebeEncoding *enc, double *out);

// Total and system qubit counts of the unlowered circuit.
//
// # Safety
// `enc` must be a live handle; each out-pointer must be writable.
enum FebeStatus febe_encoding_qubits(const struct FebeEncoding *enc,
                                     uint32_t *total,
                                     uint32_t *system);

// Counts resources after lowering with `model`.
//
// # Safety
// `enc` must be a live handle and `out` a writable pointer.
enum FebeStatus febe_encoding_resources(const struct FebeEncoding *enc,
                                        enum FebeCostModel model,
                                        struct FebeResources *out);

// Simulates the circuit and compares its block with the reference matrix.
// A failed comparison still returns `Ok`; read `pass` in the report.
//
// # Safety
// `enc` must be a live handle and `out` a writable pointer.
enum FebeStatus febe_verify(const struct FebeEncoding *enc, struct FebeVerifyReport *out);

// Writes the encoding manifest as JSON. Free the result with [`febe_string_free`].
//
// # Safety
// `enc` must be a live handle and `out` a writable pointer.
enum FebeStatus febe_encoding_manifest(const struct FebeEncoding *enc,
                                       enum FebeCostModel model,
                                       char **out);

// Lowers the circuit with `model` and writes it as OpenQASM 2 text.
// Free the result with [`febe_string_free`].
//
// # Safety
// `enc` must be a live handle and `out` a writable pointer.
enum FebeStatus febe_encoding_qasm(const struct FebeEncoding *enc,
                                   enum FebeCostModel model,
                                   char **out);

// Closed-form SELECT-SWAP lookup cost for `l` entries of `m_b` bits with
// `lambda` parallel copies.
//
// # Safety
// `out` must be a writable pointer.
enum FebeStatus febe_select_swap_cost(uint64_t l,
                                      uint64_t lambda,
                                      uint64_t m_b,
                                      struct FebeSelectSwapCost *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FEBE_H */
