#include "spancorr/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "spancorr/error.hpp"

namespace spancorr {
namespace {

constexpr std::string_view kMagic = "spancorr-checkpoint";

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little endian");

nlohmann::ordered_json config_to_json(const ModelConfig& c) {
  return {{"layers", c.layers},           {"heads", c.heads},
          {"dim", c.dim},                 {"ff_dim", c.ff_dim},
          {"max_seq_len", c.max_seq_len}, {"max_query_len", c.max_query_len},
          {"max_answer_len", c.max_answer_len}, {"dropout", c.dropout},
          {"seed", c.seed}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.layers = j.at("layers").get<int>();
  c.heads = j.at("heads").get<int>();
  c.dim = j.at("dim").get<int>();
  c.ff_dim = j.at("ff_dim").get<int>();
  c.max_seq_len = j.at("max_seq_len").get<int>();
  c.max_query_len = j.at("max_query_len").get<int>();
  c.max_answer_len = j.at("max_answer_len").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void save_checkpoint(const SpanModel& model, std::ostream& out) {
  nlohmann::ordered_json header;
  header["version"] = kCheckpointVersion;
  header["config"] = config_to_json(model.config());
  header["vocab"] = model.vocab().tokens();
  auto tensors = nlohmann::ordered_json::array();
  model.weights().visit([&](const std::string& name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  });
  header["tensors"] = std::move(tensors);
  out << kMagic << '\n' << header.dump() << '\n';
  model.weights().visit([&](const std::string&, const Matrix& m) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  });
  if (!out) throw Error("failed writing checkpoint");
}

void save_checkpoint(const SpanModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_checkpoint(model, out);
}

SpanModel load_checkpoint(std::istream& in) {
  std::string magic;
  std::string header_line;
  if (!std::getline(in, magic) || magic != kMagic || !std::getline(in, header_line)) {
    throw DataError("not a spancorr checkpoint");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt checkpoint header: ") + e.what());
  }
  if (header.value("version", 0) != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version");
  }
  try {
    const ModelConfig config = config_from_json(header.at("config"));
    Vocab vocab(header.at("vocab").get<std::vector<std::string>>());
    SpanModel model(config, vocab);
    Weights weights = model.weights();
    const auto& tensors = header.at("tensors");
    std::size_t i = 0;
    weights.visit([&](const std::string& name, Matrix& m) {
      if (i >= tensors.size()) throw DataError("checkpoint is missing tensors");
      const auto& t = tensors[i++];
      if (t.at("name").get<std::string>() != name || t.at("rows").get<Eigen::Index>() != m.rows() ||
          t.at("cols").get<Eigen::Index>() != m.cols()) {
        throw DataError("checkpoint tensor " + name + " has unexpected name or shape");
      }
      in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
      if (!in) throw DataError("checkpoint truncated in tensor " + name);
    });
    if (i != tensors.size()) throw DataError("checkpoint has extra tensors");
    return SpanModel(config, std::move(vocab), std::move(weights));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint config invalid: ") + e.what());
  }
}

SpanModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace spancorr
