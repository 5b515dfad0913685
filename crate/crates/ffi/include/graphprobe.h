#ifndef GRAPHPROBE_H
#define GRAPHPROBE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Verdict codes written by [`gp_check`].
#define GP_VERDICT_CORRECT 0

#define GP_VERDICT_INCORRECT 1

#define GP_VERDICT_UNPARSED 2

// Result codes of every fallible call.
typedef enum GpStatus {
  GP_STATUS_OK = 0,
  GP_STATUS_NULL_ARGUMENT = 1,
  GP_STATUS_INVALID_UTF8 = 2,
  // Text or JSON input could not be parsed.
  GP_STATUS_PARSE = 3,
  GP_STATUS_UNKNOWN_TASK = 4,
  GP_STATUS_INVALID_ARGUMENT = 5,
  // The task has no answer on this graph.
  GP_STATUS_SOLVE = 6,
  GP_STATUS_PANIC = 7,
} GpStatus;

// Opaque graph handle.
typedef struct GpGraph GpGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *gp_last_error(void);

// Parses a graph block in any supported encoding.
//
// # Safety
// `block` must be a NUL-terminated string and `out` a valid pointer.
enum GpStatus gp_graph_parse(const char *block, struct GpGraph **out);

// Builds a graph from a JSON record `{"n": .., "directed": .., "edges": [[u, v(, w)], ..]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum GpStatus gp_graph_from_json(const char *json, struct GpGraph **out);

// Builds an unweighted graph on nodes `1..=n` from `m` endpoint pairs.
//
// # Safety
// `sources` and `targets` must each point to `m` readable values.
enum GpStatus gp_graph_from_edges(uint32_t n,
                                  bool directed,
                                  const uint32_t *sources,
                                  const uint32_t *targets,
                                  size_t m,
                                  struct GpGraph **out);

// # Safety
// `g` must be null or a handle from this library not yet freed.
void gp_graph_free(struct GpGraph *g);

// # Safety
// `g` must be a live handle.
uint32_t gp_graph_node_count(const struct GpGraph *g);

// # Safety
// `g` must be a live handle.
size_t gp_graph_edge_count(const struct GpGraph *g);

// JSON record of the graph.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum GpStatus gp_graph_to_json(const struct GpGraph *g, char **out);

// Applies a seeded uniform random relabeling and returns a new graph.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum GpStatus gp_graph_relabel(const struct GpGraph *g, uint64_t seed, struct GpGraph **out);

// Renders the graph block for an encoding spec given as JSON; null means
// the default plain edge-list encoding.
//
// # Safety
// `g` must be a live handle, `spec_json` null or a NUL-terminated string,
// and `out` a valid pointer.
enum GpStatus gp_render(const struct GpGraph *g, const char *spec_json, char **out);

// Reference answer of a task as JSON. `params_json` holds query nodes,
// e.g. `{"source": 1, "target": 4}`, and may be null.
//
// # Safety
// `g` must be a live handle, strings NUL-terminated, `out` valid.
enum GpStatus gp_solve(const struct GpGraph *g,
                       const char *task_id,
                       const char *params_json,
                       char **out);

// Value of one spectral task.
//
// # Safety
// `g` must be a live handle, `task_id` NUL-terminated, `out` valid.
enum GpStatus gp_spectral(const struct GpGraph *g, const char *task_id, double *out);

// Extracts the answer to `task_id` from a model completion and checks it
// against the reference answer, writing one of the `GP_VERDICT_*` codes.
//
// # Safety
// `g` must be a live handle, strings NUL-terminated, `verdict` valid.
enum GpStatus gp_check(const struct GpGraph *g,
                       const char *task_id,
                       const char *params_json,
                       const char *completion,
                       int32_t *verdict);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void gp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRAPHPROBE_H */
