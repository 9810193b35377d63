/* SPDX-License-Identifier: Apache-2.0
 *
 * ris-locate: localization with multiple single-RX-RF-chain RISs
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------
 *
 * C interface of the ris-locate shared library. All functions return a
 * ris_status; outputs are passed through pointers. Handles are opaque and
 * must be released with the matching *_free function. On failure,
 * ris_last_error() returns a thread-local message describing the problem.
 */

#ifndef RIS_LOCATE_H
#define RIS_LOCATE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C"
{
#endif

typedef enum ris_status
{
    RIS_OK = 0,
    RIS_ERR_CONFIG = 1, /* malformed or invalid configuration */
    RIS_ERR_RUNTIME = 2, /* computation or I/O failure */
    RIS_ERR_ARG = 3 /* null handle or out-of-domain argument */
} ris_status;

typedef struct ris_config_s ris_config;
typedef struct ris_sweep_s ris_sweep;
typedef struct ris_pebmap_s ris_pebmap;

/* Library version as "major.minor.patch". */
const char *ris_version(void);

/* Message of the most recent failure on this thread; empty string if none. */
const char *ris_last_error(void);

/* --- configuration ---------------------------------------------------- */

ris_status ris_config_load(const char *path, ris_config **out);
ris_status ris_config_from_string(const char *text, ris_config **out);
ris_status ris_config_preset(const char *name, ris_config **out);

/* Writes up to cap-1 characters of semantic validation problems (one per
 * line) into buf and NUL-terminates. Sets *n_problems to the total count. */
ris_status ris_config_validate(const ris_config *cfg, char *buf, size_t cap, int *n_problems);

ris_status ris_config_set_seed(ris_config *cfg, uint64_t seed);
ris_status ris_config_set_threads(ris_config *cfg, int threads);
ris_status ris_config_set_output(ris_config *cfg, const char *path);

/* Default output path stored in the configuration. */
const char *ris_config_output(const ris_config *cfg);

void ris_config_free(ris_config *cfg);

/* --- Monte-Carlo sweep ------------------------------------------------- */

ris_status ris_sweep_run(const ris_config *cfg, ris_sweep **out);
ris_status ris_sweep_record_count(const ris_sweep *sweep, size_t *out);
ris_status ris_sweep_write_csv(const ris_sweep *sweep, const char *path);

/* Per-sweep-point summary table; the pointer stays owned by the handle. */
const char *ris_sweep_summary(const ris_sweep *sweep);

void ris_sweep_free(ris_sweep *sweep);

/* --- PEB map ----------------------------------------------------------- */

ris_status ris_pebmap_run(const ris_config *cfg, double z_plane, double grid_step,
                          ris_pebmap **out);
ris_status ris_pebmap_point_count(const ris_pebmap *map, size_t *out);
ris_status ris_pebmap_quantile(const ris_pebmap *map, double q, double *out);
ris_status ris_pebmap_write_csv(const ris_pebmap *map, const char *path);

/* Quantile summary line; the pointer stays owned by the handle. */
const char *ris_pebmap_summary(const ris_pebmap *map);

void ris_pebmap_free(ris_pebmap *map);

/* --- single-point bound ------------------------------------------------ */

/* Position error bound at (x, y, z) under the configuration's scenario. */
ris_status ris_peb_at(const ris_config *cfg, double x, double y, double z, double *out);

#ifdef __cplusplus
}
#endif

#endif /* RIS_LOCATE_H */
