#include "hexmpo/io.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace hexmpo {

void save_tensor_train(const TensorTrain& tt, const std::string& path) {
  tt.check_consistent();
  nlohmann::json h;
  h["format"] = "hexmpo-ttc-1";
  h["dtype"] = "complex128";
  h["byte_order"] = "little";
  h["phys_dim"] = tt.phys_dim;
  h["log_norm"] = tt.log_norm;
  if (tt.canonical_center) h["canonical_center"] = *tt.canonical_center;
  auto& shapes = h["sites"] = nlohmann::json::array();
  for (const auto& s : tt.sites) shapes.push_back({s.dl, s.d, s.dr});

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << h.dump() << "\n";
  for (const auto& s : tt.sites)
    out.write(reinterpret_cast<const char*>(s.v.data()),
              std::streamsize(s.v.size() * sizeof(cx)));
}

TensorTrain load_tensor_train(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  std::string header;
  std::getline(in, header);
  auto h = nlohmann::json::parse(header);
  if (h.value("format", "") != "hexmpo-ttc-1")
    throw std::runtime_error("unknown checkpoint format");
  TensorTrain tt;
  tt.phys_dim = h.at("phys_dim").get<int>();
  tt.log_norm = h.at("log_norm").get<double>();
  if (h.contains("canonical_center"))
    tt.canonical_center = h["canonical_center"].get<int>();
  for (const auto& sh : h.at("sites")) {
    Tensor3 t(sh.at(0).get<int>(), sh.at(1).get<int>(), sh.at(2).get<int>());
    in.read(reinterpret_cast<char*>(t.v.data()),
            std::streamsize(t.v.size() * sizeof(cx)));
    if (!in) throw std::runtime_error("checkpoint payload truncated");
    tt.sites.push_back(std::move(t));
  }
  tt.check_consistent();
  return tt;
}

void write_fidelity_csv(const FidelityLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << "step,epsilon,f,chi_max,F_cumulative\n";
  for (const auto& e : log.entries)
    out << fmt::format("{},{:.17g},{:.17g},{},{:.17g}\n", e.step, e.epsilon, e.f,
                       e.chi_max, e.f_cumulative);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << fmt::format("{:.17g}{}", row[i], i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << text;
}

}  // namespace hexmpo
