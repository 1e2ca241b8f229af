#ifndef GRIDNAV_H
#define GRIDNAV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum GridnavStatus {
  GRIDNAV_STATUS_OK = 0,
  // A required pointer argument was null.
  GRIDNAV_STATUS_NULL_ARGUMENT = 1,
  // An argument was out of range or not valid UTF-8.
  GRIDNAV_STATUS_INVALID_ARGUMENT = 2,
  // Map text or file could not be parsed.
  GRIDNAV_STATUS_MAP_FORMAT = 3,
  // File could not be read or written.
  GRIDNAV_STATUS_IO = 4,
  // The end cannot be reached from the requested start.
  GRIDNAV_STATUS_NO_PATH = 5,
  // Checkpoint file is corrupt or incompatible.
  GRIDNAV_STATUS_CHECKPOINT = 6,
  // Training configuration is invalid.
  GRIDNAV_STATUS_CONFIG = 7,
  // A caller-provided buffer was too small.
  GRIDNAV_STATUS_BUFFER_TOO_SMALL = 8,
  // Unexpected internal failure (a caught panic).
  GRIDNAV_STATUS_INTERNAL = 9,
} GridnavStatus;

typedef enum GridnavCell {
  GRIDNAV_CELL_FREE = 0,
  GRIDNAV_CELL_OBSTACLE = 1,
  GRIDNAV_CELL_START = 2,
  GRIDNAV_CELL_END = 3,
} GridnavCell;

typedef enum GridnavAlgorithm {
  GRIDNAV_ALGORITHM_ASTAR = 0,
  GRIDNAV_ALGORITHM_DIJKSTRA = 1,
  GRIDNAV_ALGORITHM_RRT = 2,
} GridnavAlgorithm;

// Opaque grid map.
typedef struct GridnavMap GridnavMap;

// Opaque trained network.
typedef struct GridnavNetwork GridnavNetwork;

// Opaque sequence of cells.
typedef struct GridnavPath GridnavPath;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *gridnav_version(void);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `len > 0`). Returns the full message size
// including the terminator, or 0 when no error has been recorded.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t gridnav_last_error_message(char *buf, size_t len);

// Parses map text.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum GridnavStatus gridnav_map_parse(const char *text, struct GridnavMap **out);

// Reads a map file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum GridnavStatus gridnav_map_load(const char *path, struct GridnavMap **out);

// The bundled 20×20 canonical map.
//
// # Safety
// `out` must be writable.
enum GridnavStatus gridnav_map_canonical(struct GridnavMap **out);

// # Safety
// `map` must be null or a pointer returned by this library, not yet freed.
void gridnav_map_free(struct GridnavMap *map);

// Writes width and height.
//
// # Safety
// `map` must be a live map; outputs must be writable.
enum GridnavStatus gridnav_map_size(const struct GridnavMap *map, size_t *width, size_t *height);

// Writes the designated start and end cells.
//
// # Safety
// `map` must be a live map; outputs must be writable.
enum GridnavStatus gridnav_map_endpoints(const struct GridnavMap *map,
                                         int32_t *start_x,
                                         int32_t *start_y,
                                         int32_t *end_x,
                                         int32_t *end_y);

// Cell kind at `(x, y)`.
//
// # Safety
// `map` must be a live map; `out` must be writable.
enum GridnavStatus gridnav_map_cell(const struct GridnavMap *map,
                                    int32_t x,
                                    int32_t y,
                                    enum GridnavCell *out);

// Plans from `(start_x, start_y)` to the end. `algorithm` is a
// [`GridnavAlgorithm`] value; `seed` and `max_samples` only matter for RRT.
//
// # Safety
// `map` must be a live map; `out` must be writable.
enum GridnavStatus gridnav_plan(const struct GridnavMap *map,
                                uint32_t algorithm,
                                int32_t start_x,
                                int32_t start_y,
                                uint64_t seed,
                                size_t max_samples,
                                struct GridnavPath **out);

// Number of cells in the path.
//
// # Safety
// `path` must be null or a live path.
size_t gridnav_path_count(const struct GridnavPath *path);

// Sum of Euclidean step lengths.
//
// # Safety
// `path` must be null or a live path.
double gridnav_path_length(const struct GridnavPath *path);

// Whether the path ends on the map's end cell.
//
// # Safety
// `path` must be null or a live path.
bool gridnav_path_reached_end(const struct GridnavPath *path);

// Copies cells as interleaved `x, y` pairs; `xy` must hold
// `2 * capacity` values. Fails with `BufferTooSmall` when `capacity` is
// less than [`gridnav_path_count`].
//
// # Safety
// `path` must be a live path; `xy` must point to `2 * capacity` writable
// `int32_t` values.
enum GridnavStatus gridnav_path_cells(const struct GridnavPath *path, int32_t *xy, size_t capacity);

// # Safety
// `path` must be null or a pointer returned by this library, not yet freed.
void gridnav_path_free(struct GridnavPath *path);

// Loads a network checkpoint.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum GridnavStatus gridnav_network_load(const char *path, struct GridnavNetwork **out);

// Writes a network checkpoint.
//
// # Safety
// `network` must be live; `path` must be a NUL-terminated string.
enum GridnavStatus gridnav_network_save(const struct GridnavNetwork *network, const char *path);

// # Safety
// `network` must be null or a pointer returned by this library, not yet
// freed.
void gridnav_network_free(struct GridnavNetwork *network);

// Trains a network on `map`. `config_toml` may be null for the default
// configuration; otherwise it is a TOML training config in which omitted
// keys take their defaults.
//
// # Safety
// `map` must be live; `config_toml` null or NUL-terminated; `out` writable.
enum GridnavStatus gridnav_train(const struct GridnavMap *map,
                                 const char *config_toml,
                                 struct GridnavNetwork **out);

// Q-values of the eight actions (east first, counter-clockwise) with the
// robot at `(x, y)`.
//
// # Safety
// `network` and `map` must be live; `q_out` must hold 8 doubles.
enum GridnavStatus gridnav_network_q_values(const struct GridnavNetwork *network,
                                            const struct GridnavMap *map,
                                            int32_t x,
                                            int32_t y,
                                            double *q_out);

// Greedy rollout from `(start_x, start_y)`. A failed rollout still
// succeeds as a call; check [`gridnav_path_reached_end`].
//
// # Safety
// `network` and `map` must be live; `out` must be writable.
enum GridnavStatus gridnav_rollout(const struct GridnavNetwork *network,
                                   const struct GridnavMap *map,
                                   int32_t start_x,
                                   int32_t start_y,
                                   size_t step_cap,
                                   struct GridnavPath **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRIDNAV_H */
