/* Copyright 2026 The FDIN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "fdin/run_config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "fdin/checkpoint.h"

namespace fdin {
namespace {

using Setter = std::function<absl::Status(const std::string&, RunConfig*)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  Setter set;
  Getter get;
};

absl::Status BadValue(const std::string& key, const std::string& value,
                      const std::string& expected) {
  return absl::InvalidArgumentError(absl::StrCat(
      "config key '", key, "': cannot parse '", value, "' as ", expected));
}

template <typename U>
Field IntField(const std::string& key, std::function<U&(RunConfig&)> ref) {
  return {[key, ref](const std::string& v, RunConfig* c) -> absl::Status {
            int64_t parsed;
            if (!absl::SimpleAtoi(v, &parsed) ||
                parsed < int64_t(std::numeric_limits<U>::min()) ||
                (parsed > 0 &&
                 uint64_t(parsed) > uint64_t(std::numeric_limits<U>::max()))) {
              return BadValue(key, v, "an integer");
            }
            ref(*c) = static_cast<U>(parsed);
            return absl::OkStatus();
          },
          [ref](const RunConfig& c) {
            return absl::StrCat(ref(const_cast<RunConfig&>(c)));
          }};
}

Field DoubleField(const std::string& key,
                  std::function<double&(RunConfig&)> ref) {
  return {[key, ref](const std::string& v, RunConfig* c) -> absl::Status {
            double parsed;
            if (!absl::SimpleAtod(v, &parsed))
              return BadValue(key, v, "a number");
            ref(*c) = parsed;
            return absl::OkStatus();
          },
          [ref](const RunConfig& c) {
            std::ostringstream os;
            os.precision(17);
            os << ref(const_cast<RunConfig&>(c));
            return os.str();
          }};
}

Field BoolField(const std::string& key, std::function<bool&(RunConfig&)> ref) {
  return {
      [key, ref](const std::string& v, RunConfig* c) -> absl::Status {
        bool parsed;
        if (!absl::SimpleAtob(v, &parsed)) return BadValue(key, v, "a bool");
        ref(*c) = parsed;
        return absl::OkStatus();
      },
      [ref](const RunConfig& c) {
        return std::string(ref(const_cast<RunConfig&>(c)) ? "true" : "false");
      }};
}

Field StringField(std::function<std::string&(RunConfig&)> ref) {
  return {[ref](const std::string& v, RunConfig* c) {
            ref(*c) = v;
            return absl::OkStatus();
          },
          [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); }};
}

Field IntListField(const std::string& key,
                   std::function<std::vector<int>&(RunConfig&)> ref) {
  return {[key, ref](const std::string& v, RunConfig* c) -> absl::Status {
            std::vector<int> out;
            for (absl::string_view part :
                 absl::StrSplit(v, ',', absl::SkipWhitespace())) {
              int parsed;
              if (!absl::SimpleAtoi(part, &parsed)) {
                return BadValue(key, v, "a comma-separated integer list");
              }
              out.push_back(parsed);
            }
            ref(*c) = std::move(out);
            return absl::OkStatus();
          },
          [ref](const RunConfig& c) {
            return absl::StrJoin(ref(const_cast<RunConfig&>(c)), ",");
          }};
}

const std::map<std::string, Field>& Fields() {
  static const auto* fields = new std::map<std::string, Field>{
      {"height",
       IntField<int>("height",
                     [](RunConfig& c) -> int& { return c.model.height; })},
      {"width",
       IntField<int>("width",
                     [](RunConfig& c) -> int& { return c.model.width; })},
      {"stem_channels", IntField<int>("stem_channels",
                                      [](RunConfig& c) -> int& {
                                        return c.model.stem_channels;
                                      })},
      {"stage_channels", IntListField("stage_channels",
                                      [](RunConfig& c) -> std::vector<int>& {
                                        return c.model.stage_channels;
                                      })},
      {"ratio_global", DoubleField("ratio_global",
                                   [](RunConfig& c) -> double& {
                                     return c.model.ratio_global;
                                   })},
      {"enable_absr",
       BoolField("enable_absr",
                 [](RunConfig& c) -> bool& { return c.model.enable_absr; })},
      {"enable_ffca",
       BoolField("enable_ffca",
                 [](RunConfig& c) -> bool& { return c.model.enable_ffca; })},
      {"absr_per_channel", BoolField("absr_per_channel",
                                     [](RunConfig& c) -> bool& {
                                       return c.model.absr_per_channel;
                                     })},
      {"absr_concat_raw", BoolField("absr_concat_raw",
                                    [](RunConfig& c) -> bool& {
                                      return c.model.absr_concat_raw;
                                    })},
      {"learning_rate", DoubleField("learning_rate",
                                    [](RunConfig& c) -> double& {
                                      return c.train.learning_rate;
                                    })},
      {"lr_halve_epoch", IntField<int>("lr_halve_epoch",
                                       [](RunConfig& c) -> int& {
                                         return c.train.lr_halve_epoch;
                                       })},
      {"epochs",
       IntField<int>("epochs",
                     [](RunConfig& c) -> int& { return c.train.epochs; })},
      {"batch_size",
       IntField<int>("batch_size",
                     [](RunConfig& c) -> int& { return c.train.batch_size; })},
      {"t_c",
       IntField<int>("t_c", [](RunConfig& c) -> int& { return c.train.t_c; })},
      {"train_stride", IntField<int>("train_stride",
                                     [](RunConfig& c) -> int& {
                                       return c.train.train_stride;
                                     })},
      {"max_steps", IntField<int64_t>("max_steps",
                                      [](RunConfig& c) -> int64_t& {
                                        return c.train.max_steps;
                                      })},
      {"flip_prob",
       DoubleField("flip_prob",
                   [](RunConfig& c) -> double& { return c.train.flip_prob; })},
      {"seed",
       IntField<uint64_t>(
           "seed", [](RunConfig& c) -> uint64_t& { return c.train.seed; })},
      {"workers",
       IntField<int>("workers",
                     [](RunConfig& c) -> int& { return c.train.workers; })},
      {"pretrained_weights", StringField([](RunConfig& c) -> std::string& {
         return c.train.pretrained_weights;
       })},
      {"manifest",
       StringField([](RunConfig& c) -> std::string& { return c.manifest; })},
      {"checkpoint",
       StringField([](RunConfig& c) -> std::string& { return c.checkpoint; })},
      {"predictions",
       StringField([](RunConfig& c) -> std::string& { return c.predictions; })},
      {"threshold",
       DoubleField("threshold",
                   [](RunConfig& c) -> double& { return c.threshold; })},
      {"qf_list", IntListField("qf_list",
                               [](RunConfig& c) -> std::vector<int>& {
                                 return c.qf_list;
                               })},
      {"n_clips",
       IntField<int>("n_clips",
                     [](RunConfig& c) -> int& { return c.n_clips; })},
      {"frames",
       IntField<int>("frames", [](RunConfig& c) -> int& { return c.frames; })},
      {"method",
       {[](const std::string& v, RunConfig* c) -> absl::Status {
          FDIN_ASSIGN_OR_RETURN(c->method, ParseFillMethod(v));
          return absl::OkStatus();
        },
        [](const RunConfig& c) {
          return std::string(FillMethodName(c.method));
        }}},
      {"gradcheck_corrupt", StringField([](RunConfig& c) -> std::string& {
         return c.gradcheck_corrupt;
       })},
  };
  return *fields;
}

absl::Status Apply(const std::string& key, const std::string& value,
                   RunConfig* config) {
  const auto& fields = Fields();
  auto it = fields.find(key);
  if (it == fields.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown config key '", key,
                     "'; known keys: ", absl::StrJoin(RunConfigKeys(), ", ")));
  }
  return it->second.set(value, config);
}

absl::Status ApplyLine(absl::string_view line, const std::string& where,
                       RunConfig* config) {
  std::pair<std::string, std::string> kv =
      absl::StrSplit(line, absl::MaxSplits('=', 1));
  const std::string key(absl::StripAsciiWhitespace(kv.first));
  const std::string value(absl::StripAsciiWhitespace(kv.second));
  if (line.find('=') == absl::string_view::npos || key.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, ": expected 'key = value', got '", line, "'"));
  }
  return Apply(key, value, config);
}

}  // namespace

absl::Status ValidateTrainConfig(const TrainConfig& c) {
  auto positive = [](const char* name, double v) -> absl::Status {
    if (v > 0) return absl::OkStatus();
    return absl::InvalidArgumentError(
        absl::StrCat("config key '", name, "' must be positive, got ", v));
  };
  FDIN_RETURN_IF_ERROR(positive("learning_rate", c.learning_rate));
  FDIN_RETURN_IF_ERROR(positive("lr_halve_epoch", c.lr_halve_epoch));
  FDIN_RETURN_IF_ERROR(positive("epochs", c.epochs));
  FDIN_RETURN_IF_ERROR(positive("batch_size", c.batch_size));
  FDIN_RETURN_IF_ERROR(positive("t_c", c.t_c));
  FDIN_RETURN_IF_ERROR(positive("train_stride", c.train_stride));
  if (c.lr_halve_epoch > c.epochs) {
    return absl::InvalidArgumentError(
        absl::StrCat("config key 'lr_halve_epoch' (", c.lr_halve_epoch,
                     ") must not exceed 'epochs' (", c.epochs, ")"));
  }
  if (c.max_steps < 0) {
    return absl::InvalidArgumentError("config key 'max_steps' must be >= 0");
  }
  if (!(c.flip_prob >= 0.0 && c.flip_prob <= 1.0)) {
    return absl::InvalidArgumentError(
        "config key 'flip_prob' must be in [0, 1]");
  }
  if (c.workers < 0) {
    return absl::InvalidArgumentError("config key 'workers' must be >= 0");
  }
  return absl::OkStatus();
}

std::vector<std::string> RunConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : Fields()) keys.push_back(k);
  return keys;
}

absl::StatusOr<RunConfig> ParseRunConfig(
    const std::string& text, const std::vector<std::string>& overrides) {
  RunConfig config;
  int line_no = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::string_view line = raw.substr(0, raw.find('#'));
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    FDIN_RETURN_IF_ERROR(
        ApplyLine(line, absl::StrCat("line ", line_no), &config));
  }
  for (const std::string& o : overrides) {
    FDIN_RETURN_IF_ERROR(ApplyLine(o, absl::StrCat("--set ", o), &config));
  }
  config.model.seed = config.train.seed;
  return config;
}

absl::StatusOr<RunConfig> LoadRunConfig(
    const std::filesystem::path& path,
    const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) {
      return absl::InvalidArgumentError(
          absl::StrCat("cannot read config file ", path.string()));
    }
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  return ParseRunConfig(text, overrides);
}

std::string EffectiveConfigText(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : Fields()) {
    absl::StrAppend(&out, key, " = ", field.get(config), "\n");
  }
  return out;
}

uint64_t RunConfigDigest(const RunConfig& config) {
  return Fnv1a64(EffectiveConfigText(config));
}

}  // namespace fdin
