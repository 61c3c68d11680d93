#include "fibereq/nn/checkpoint.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <functional>
#include <fstream>
#include <sstream>
#include <vector>

#include "fibereq/errors.hpp"

namespace fibereq::nn {
namespace {

constexpr std::string_view kMagic = "fibereq-bilstm";
constexpr int kVersion = 1;
constexpr std::array<char, 4> kGateSuffix{'i', 'f', 'o', 'c'};

// Named tensor slot: a dense block of some model storage.
struct Slot {
  std::string name;
  Eigen::Index rows;
  Eigen::Index cols;
  std::function<double&(Eigen::Index, Eigen::Index)> at;
};

std::vector<Slot> slots(BiLstmModel& m) {
  std::vector<Slot> out;
  out.push_back({"input.mean", 1, kInputSize, [&m](Eigen::Index, Eigen::Index c) -> double& {
                   return m.input.mean[static_cast<std::size_t>(c)];
                 }});
  out.push_back({"input.scale", 1, kInputSize, [&m](Eigen::Index, Eigen::Index c) -> double& {
                   return m.input.scale[static_cast<std::size_t>(c)];
                 }});
  const Eigen::Index l = m.hidden_size;
  for (auto [prefix, cell] : {std::pair{"fwd", &m.params.fwd}, std::pair{"bwd", &m.params.bwd}}) {
    for (int g = 0; g < 4; ++g) {
      const Eigen::Index off = g * l;
      out.push_back({std::string(prefix) + ".W_x" + kGateSuffix[g], l, kInputSize,
                     [cell, off](Eigen::Index r, Eigen::Index c) -> double& { return cell->wx(off + r, c); }});
    }
    for (int g = 0; g < 4; ++g) {
      const Eigen::Index off = g * l;
      out.push_back({std::string(prefix) + ".W_h" + kGateSuffix[g], l, l,
                     [cell, off](Eigen::Index r, Eigen::Index c) -> double& { return cell->wh(off + r, c); }});
    }
    for (int g = 0; g < 4; ++g) {
      const Eigen::Index off = g * l;
      out.push_back({std::string(prefix) + ".b_" + kGateSuffix[g], l, 1,
                     [cell, off](Eigen::Index r, Eigen::Index) -> double& { return cell->b(off + r); }});
    }
  }
  for (auto [prefix, head] : {std::pair{"head_x", &m.params.head_x}, std::pair{"head_y", &m.params.head_y}}) {
    out.push_back({std::string(prefix) + ".W", kNumClasses, l,
                   [head](Eigen::Index r, Eigen::Index c) -> double& { return head->w(r, c); }});
    out.push_back({std::string(prefix) + ".b", kNumClasses, 1,
                   [head](Eigen::Index r, Eigen::Index) -> double& { return head->b(r); }});
  }
  return out;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::string_view token() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw FormatError("checkpoint: unexpected end of file");
    return text_.substr(start, pos_ - start);
  }

  void expect(std::string_view word) {
    const auto t = token();
    if (t != word)
      throw FormatError("checkpoint: expected '" + std::string(word) + "', found '" + std::string(t) + "'");
  }

  long integer() {
    const auto t = token();
    long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
      throw FormatError("checkpoint: bad integer '" + std::string(t) + "'");
    return v;
  }

  double real() {
    const auto t = token();
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
      throw FormatError("checkpoint: bad number '" + std::string(t) + "'");
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const BiLstmModel& model) {
  BiLstmModel copy = model;
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
  out += "hidden_size " + std::to_string(model.hidden_size) + "\n";
  out += "word_length " + std::to_string(model.word_length) + "\n";
  for (auto& s : slots(copy)) {
    out += "tensor " + s.name + " " + std::to_string(s.rows) + " " + std::to_string(s.cols) + "\n";
    for (Eigen::Index r = 0; r < s.rows; ++r) {
      for (Eigen::Index c = 0; c < s.cols; ++c) {
        if (c) out += ' ';
        append_double(out, s.at(r, c));
      }
      out += '\n';
    }
  }
  out += "end\n";
  return out;
}

BiLstmModel parse_model(std::string_view text) {
  Reader rd(text);
  rd.expect(kMagic);
  const long version = rd.integer();
  if (version != kVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  rd.expect("hidden_size");
  const long hidden = rd.integer();
  rd.expect("word_length");
  const long m = rd.integer();
  if (hidden < 1 || hidden > 65536) throw FormatError("checkpoint: invalid hidden_size " + std::to_string(hidden));
  if (m < 1 || m % 2 == 0) throw FormatError("checkpoint: invalid word_length " + std::to_string(m));

  BiLstmModel model(static_cast<int>(hidden), static_cast<int>(m));
  for (auto& s : slots(model)) {
    rd.expect("tensor");
    const auto name = rd.token();
    if (name != s.name)
      throw FormatError("checkpoint: expected tensor " + s.name + ", found " + std::string(name));
    const long rows = rd.integer();
    const long cols = rd.integer();
    if (rows != s.rows || cols != s.cols)
      throw FormatError("checkpoint: tensor " + s.name + " has dimensions " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", expected " + std::to_string(s.rows) + "x" +
                        std::to_string(s.cols) + " for hidden_size " + std::to_string(hidden));
    for (Eigen::Index r = 0; r < s.rows; ++r)
      for (Eigen::Index c = 0; c < s.cols; ++c) s.at(r, c) = rd.real();
  }
  rd.expect("end");
  return model;
}

void save_model(const BiLstmModel& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("save_model: cannot open " + path.string());
  os << serialize_model(model);
  if (!os) throw Error("save_model: write failed for " + path.string());
}

BiLstmModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("load_model: cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_model(ss.str());
}

}  // namespace fibereq::nn
