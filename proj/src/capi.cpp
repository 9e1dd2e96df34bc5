// Copyright 2026 The hamr3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "hamr3d/hamr3d.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "hamr3d/commands.hpp"
#include "hamr3d/config.hpp"
#include "hamr3d/error.hpp"
#include "hamr3d/media_io.hpp"

struct hamr3d_config {
  hamr::Config value;
};

struct hamr3d_media {
  hamr::MediaStack value;
};

namespace {

thread_local std::string g_last_error;

hamr3d_status status_of(hamr::ErrorKind kind) {
  switch (kind) {
    case hamr::ErrorKind::kConfig: return HAMR3D_ERR_CONFIG;
    case hamr::ErrorKind::kGeometry: return HAMR3D_ERR_GEOMETRY;
    case hamr::ErrorKind::kSimulation: return HAMR3D_ERR_SIMULATION;
    case hamr::ErrorKind::kIo: return HAMR3D_ERR_IO;
  }
  return HAMR3D_ERR_INTERNAL;
}

template <typename Fn>
hamr3d_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HAMR3D_OK;
  } catch (const hamr::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
  } catch (...) {
    g_last_error = "internal error";
  }
  return HAMR3D_ERR_INTERNAL;
}

hamr3d_status invalid(const char* what) {
  g_last_error = what;
  return HAMR3D_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void set_report(char** report, const std::string& text) {
  if (report != nullptr) *report = copy_string(text);
}

hamr::CommandOptions to_options(const hamr3d_options* o) {
  hamr::CommandOptions out;
  if (o == nullptr) return out;
  if (o->has_seed) out.seed = o->seed;
  if (o->repeats > 0) out.repeats = o->repeats;
  if (o->threads >= 0) out.threads = o->threads;
  if (o->out != nullptr) out.out = o->out;
  out.laser_off = o->laser_off != 0;
  if (o->track_grains != nullptr) out.track_grains = o->track_grains;
  if (o->axis != nullptr) out.axis = o->axis;
  if (o->values != nullptr) out.values.assign(o->values, o->values + o->value_count);
  if (o->layer != nullptr) out.layer = o->layer;
  if (o->has_profile_time) out.profile_time = o->profile_time;
  return out;
}

}  // namespace

extern "C" {

void hamr3d_options_init(hamr3d_options* options) {
  if (options == nullptr) return;
  *options = hamr3d_options{};
  options->threads = -1;
}

const char* hamr3d_version(void) { return "0.1.0"; }

const char* hamr3d_last_error(void) { return g_last_error.c_str(); }

const char* hamr3d_status_name(hamr3d_status status) {
  switch (status) {
    case HAMR3D_OK: return "ok";
    case HAMR3D_ERR_CONFIG: return "config error";
    case HAMR3D_ERR_GEOMETRY: return "geometry error";
    case HAMR3D_ERR_SIMULATION: return "simulation error";
    case HAMR3D_ERR_IO: return "I/O error";
    case HAMR3D_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HAMR3D_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void hamr3d_string_free(char* s) { std::free(s); }

hamr3d_status hamr3d_config_default(hamr3d_config** out) {
  if (out == nullptr) return invalid("out is NULL");
  return guarded([&] { *out = new hamr3d_config{hamr::default_config()}; });
}

hamr3d_status hamr3d_config_load(const char* path, hamr3d_config** out) {
  if (path == nullptr || out == nullptr) return invalid("path or out is NULL");
  return guarded([&] { *out = new hamr3d_config{hamr::load_config(path)}; });
}

hamr3d_status hamr3d_config_parse(const char* json_text, hamr3d_config** out) {
  if (json_text == nullptr || out == nullptr) {
    return invalid("json_text or out is NULL");
  }
  return guarded(
      [&] { *out = new hamr3d_config{hamr::parse_config(json_text)}; });
}

hamr3d_status hamr3d_config_serialize(const hamr3d_config* config, char** out) {
  if (config == nullptr || out == nullptr) return invalid("config or out is NULL");
  return guarded(
      [&] { *out = copy_string(hamr::serialize_config(config->value)); });
}

hamr3d_status hamr3d_config_validate(const hamr3d_config* config) {
  if (config == nullptr) return invalid("config is NULL");
  return guarded([&] { hamr::validate(config->value); });
}

void hamr3d_config_free(hamr3d_config* config) { delete config; }

hamr3d_status hamr3d_media_generate(const hamr3d_config* config,
                                    hamr3d_media** out) {
  if (config == nullptr || out == nullptr) return invalid("config or out is NULL");
  return guarded([&] {
    const hamr::Config& c = config->value;
    hamr::validate(c);
    *out = new hamr3d_media{hamr::build_media(
        c.media.layers, c.media.track_length, c.media.track_width,
        c.media_seed, c.media.lloyd_iterations)};
  });
}

hamr3d_status hamr3d_media_load(const char* path, hamr3d_media** out) {
  if (path == nullptr || out == nullptr) return invalid("path or out is NULL");
  return guarded([&] { *out = new hamr3d_media{hamr::load_media(path)}; });
}

hamr3d_status hamr3d_media_save(const hamr3d_media* media, const char* path) {
  if (media == nullptr || path == nullptr) return invalid("media or path is NULL");
  return guarded([&] { hamr::save_media(path, media->value); });
}

size_t hamr3d_media_layer_count(const hamr3d_media* media) {
  return media == nullptr ? 0 : media->value.layers.size();
}

size_t hamr3d_media_grain_count(const hamr3d_media* media) {
  return media == nullptr ? 0 : media->value.grain_count();
}

void hamr3d_media_free(hamr3d_media* media) { delete media; }

hamr3d_status hamr3d_cmd_generate_media(const hamr3d_config* config,
                                        const hamr3d_options* options,
                                        char** report) {
  if (config == nullptr) return invalid("config is NULL");
  return guarded([&] {
    const auto o = to_options(options);
    set_report(report, hamr::cmd_generate_media(
                           hamr::apply_options(config->value, o), o));
  });
}

hamr3d_status hamr3d_cmd_write(const hamr3d_config* config,
                               const char* media_path,
                               const hamr3d_options* options, char** report) {
  if (config == nullptr || media_path == nullptr) {
    return invalid("config or media_path is NULL");
  }
  return guarded([&] {
    const auto o = to_options(options);
    set_report(report, hamr::cmd_write(hamr::apply_options(config->value, o),
                                       media_path, o));
  });
}

hamr3d_status hamr3d_cmd_sweep(const hamr3d_config* config,
                               const hamr3d_options* options, char** report) {
  if (config == nullptr) return invalid("config is NULL");
  return guarded([&] {
    const auto o = to_options(options);
    set_report(report,
               hamr::cmd_sweep(hamr::apply_options(config->value, o), o));
  });
}

hamr3d_status hamr3d_cmd_plot_data(const hamr3d_config* config,
                                   const char* run_dir,
                                   const hamr3d_options* options,
                                   char** report) {
  return guarded([&] {
    const auto o = to_options(options);
    std::optional<hamr::Config> c;
    if (config != nullptr) c = hamr::apply_options(config->value, o);
    set_report(report,
               hamr::cmd_plot_data(run_dir == nullptr ? "" : run_dir, c, o));
  });
}

hamr3d_status hamr3d_cmd_validate_config(const hamr3d_config* config,
                                         const hamr3d_options* options,
                                         char** report) {
  if (config == nullptr) return invalid("config is NULL");
  return guarded([&] {
    const auto o = to_options(options);
    set_report(report, hamr::cmd_validate_config(
                           hamr::apply_options(config->value, o), o));
  });
}

}  // extern "C"
