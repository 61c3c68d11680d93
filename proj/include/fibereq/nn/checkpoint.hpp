#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fibereq/nn/model.hpp"

namespace fibereq::nn {

// Text checkpoint:
//
//   fibereq-bilstm 1
//   hidden_size <L>
//   word_length <m>
//   tensor <name> <rows> <cols>
//   <row-major values, one row per line>
//   ...
//   end
//
// Tensors: input.mean, input.scale (1x4); {fwd,bwd}.W_x{i,f,o,c} (Lx4),
// {fwd,bwd}.W_h{i,f,o,c} (LxL), {fwd,bwd}.b_{i,f,o,c} (Lx1);
// head_{x,y}.W (16xL), head_{x,y}.b (16x1). Values use shortest
// round-trip decimal, so save -> load is bit-exact.
std::string serialize_model(const BiLstmModel& model);
BiLstmModel parse_model(std::string_view text);

void save_model(const BiLstmModel& model, const std::filesystem::path& path);
BiLstmModel load_model(const std::filesystem::path& path);

}  // namespace fibereq::nn
