/*
 * Copyright 2026 The hamr3d Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the hamr3d simulator. Handles are opaque; every call that
 * can fail returns a status, and hamr3d_last_error() holds the message of
 * the most recent failure on the calling thread. Strings returned through
 * char** outputs are owned by the caller and released with
 * hamr3d_string_free().
 */

#ifndef HAMR3D_H
#define HAMR3D_H

#include <stddef.h>
#include <stdint.h>

#if defined(HAMR3D_BUILDING)
#define HAMR3D_API __attribute__((visibility("default")))
#else
#define HAMR3D_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hamr3d_status {
  HAMR3D_OK = 0,
  HAMR3D_ERR_CONFIG = 1,
  HAMR3D_ERR_GEOMETRY = 2,
  HAMR3D_ERR_SIMULATION = 3,
  HAMR3D_ERR_IO = 4,
  HAMR3D_ERR_INVALID_ARGUMENT = 5,
  HAMR3D_ERR_INTERNAL = 6
} hamr3d_status;

typedef struct hamr3d_config hamr3d_config;
typedef struct hamr3d_media hamr3d_media;

/* Command-line style overrides. Initialize with hamr3d_options_init(). */
typedef struct hamr3d_options {
  int has_seed;
  uint64_t seed;
  int repeats;              /* <= 0 keeps the config value */
  int threads;              /* < 0: HAMR3D_THREADS, then the config */
  const char* out;          /* NULL keeps the config output directory */
  int laser_off;
  const char* track_grains; /* "auto" or "12,40"; NULL for none */
  const char* axis;         /* sweep: "Hw" or "delta_d"; NULL keeps config */
  const double* values;     /* sweep values; NULL keeps config */
  size_t value_count;
  const char* layer;        /* Hw sweep: "top" or "bottom" */
  int has_profile_time;
  double profile_time;      /* plot-data: dump T and H_z at this time, ns */
} hamr3d_options;

HAMR3D_API void hamr3d_options_init(hamr3d_options* options);

HAMR3D_API const char* hamr3d_version(void);
HAMR3D_API const char* hamr3d_last_error(void);
HAMR3D_API const char* hamr3d_status_name(hamr3d_status status);
HAMR3D_API void hamr3d_string_free(char* s);

HAMR3D_API hamr3d_status hamr3d_config_default(hamr3d_config** out);
HAMR3D_API hamr3d_status hamr3d_config_load(const char* path,
                                            hamr3d_config** out);
HAMR3D_API hamr3d_status hamr3d_config_parse(const char* json_text,
                                             hamr3d_config** out);
HAMR3D_API hamr3d_status hamr3d_config_serialize(const hamr3d_config* config,
                                                 char** out);
HAMR3D_API hamr3d_status hamr3d_config_validate(const hamr3d_config* config);
HAMR3D_API void hamr3d_config_free(hamr3d_config* config);

HAMR3D_API hamr3d_status hamr3d_media_generate(const hamr3d_config* config,
                                               hamr3d_media** out);
HAMR3D_API hamr3d_status hamr3d_media_load(const char* path,
                                           hamr3d_media** out);
HAMR3D_API hamr3d_status hamr3d_media_save(const hamr3d_media* media,
                                           const char* path);
HAMR3D_API size_t hamr3d_media_layer_count(const hamr3d_media* media);
HAMR3D_API size_t hamr3d_media_grain_count(const hamr3d_media* media);
HAMR3D_API void hamr3d_media_free(hamr3d_media* media);

/* Subcommands. `report` receives the text summary on success (may be
 * NULL); on failure the message is in hamr3d_last_error(). */
HAMR3D_API hamr3d_status hamr3d_cmd_generate_media(
    const hamr3d_config* config, const hamr3d_options* options,
    char** report);
HAMR3D_API hamr3d_status hamr3d_cmd_write(const hamr3d_config* config,
                                          const char* media_path,
                                          const hamr3d_options* options,
                                          char** report);
HAMR3D_API hamr3d_status hamr3d_cmd_sweep(const hamr3d_config* config,
                                          const hamr3d_options* options,
                                          char** report);
/* `config` may be NULL: the run's manifest supplies it. `run_dir` may be
 * NULL when only a field profile is requested. */
HAMR3D_API hamr3d_status hamr3d_cmd_plot_data(const hamr3d_config* config,
                                              const char* run_dir,
                                              const hamr3d_options* options,
                                              char** report);
HAMR3D_API hamr3d_status hamr3d_cmd_validate_config(
    const hamr3d_config* config, const hamr3d_options* options,
    char** report);

#ifdef __cplusplus
}
#endif

#endif /* HAMR3D_H */
