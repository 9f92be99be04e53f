#include "fracdiff/serialize.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fracdiff {

namespace {

using json = nlohmann::ordered_json;

void write_bytes(const std::string& path, const std::vector<double>& payload) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SerializationError("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
  if (!out) throw SerializationError("short write: " + path);
}

std::vector<double> read_bytes(const std::string& path, size_t expected) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw SerializationError("cannot open for reading: " + path);
  const auto size = static_cast<size_t>(in.tellg());
  if (size != expected * sizeof(double))
    throw SerializationError("unexpected payload size in " + path + ": " +
                             std::to_string(size) + " bytes, expected " +
                             std::to_string(expected * sizeof(double)));
  in.seekg(0);
  std::vector<double> payload(expected);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(size));
  if (!in) throw SerializationError("short read: " + path);
  return payload;
}

std::string checksum_hex(const std::vector<double>& payload) {
  const uint64_t h = fnv1a(payload.data(), payload.size() * sizeof(double));
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

json load_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SerializationError("cannot open sidecar: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw SerializationError("malformed sidecar " + path + ": " + e.what());
  }
  return j;
}

}  // namespace

uint64_t fnv1a(const void* data, size_t n_bytes, uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < n_bytes; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

void save_kernel_table(const KernelTable& table, const std::string& path_base) {
  std::vector<double> payload;
  payload.reserve(table.q.size() * 7);
  auto append = [&](const std::vector<double>& v) {
    payload.insert(payload.end(), v.begin(), v.end());
  };
  append(table.q);
  append(table.p);
  for (const auto& g : table.grad) append(g);
  for (int i = 0; i < table.grid.dim; ++i)
    for (int j = i; j < table.grid.dim; ++j) append(table.hess_at(i, j));

  write_bytes(path_base + ".bin", payload);
  json sidecar = {
      {"format", "fracdiff-kernel-table"},
      {"version", 1},
      {"alpha", table.alpha},
      {"t_ref", table.t_ref},
      {"dim", table.grid.dim},
      {"box_length", table.grid.box_length},
      {"n_points", table.grid.n_points},
      {"checksum", checksum_hex(payload)},
  };
  std::ofstream side(path_base + ".json");
  if (!side) throw SerializationError("cannot open sidecar for writing: " + path_base + ".json");
  side << sidecar.dump(2) << "\n";
}

KernelTable load_kernel_table(const std::string& path_base) {
  const json sidecar = load_sidecar(path_base + ".json");
  if (sidecar.value("format", "") != "fracdiff-kernel-table")
    throw SerializationError("sidecar is not a kernel table: " + path_base);
  KernelTable table;
  table.alpha = sidecar.at("alpha").get<double>();
  table.t_ref = sidecar.at("t_ref").get<double>();
  table.grid = SpaceGrid(sidecar.at("dim").get<int>(), sidecar.at("box_length").get<double>(),
                         sidecar.at("n_points").get<int>());
  const long n_total = table.grid.n_total();
  const int dim = table.grid.dim;
  const int n_hess = dim == 1 ? 1 : 3;
  const size_t expected = static_cast<size_t>(n_total) * (2 + dim + n_hess);
  const auto payload = read_bytes(path_base + ".bin", expected);
  if (checksum_hex(payload) != sidecar.at("checksum").get<std::string>())
    throw SerializationError("checksum mismatch for " + path_base + ".bin");

  auto cursor = payload.begin();
  auto take = [&](std::vector<double>& dst) {
    dst.assign(cursor, cursor + n_total);
    cursor += n_total;
  };
  take(table.q);
  take(table.p);
  table.grad.resize(dim);
  for (int i = 0; i < dim; ++i) take(table.grad[i]);
  if (dim == 1) {
    table.hess.resize(1);
    take(table.hess[0]);
  } else {
    table.hess.resize(4);
    take(table.hess[0]);
    take(table.hess[1]);
    table.hess[2] = table.hess[1];
    take(table.hess[3]);
  }
  return table;
}

void save_field(const Field& field, double alpha, const std::string& path_base) {
  write_bytes(path_base + ".bin", field.values);
  json sidecar = {
      {"format", "fracdiff-field"},
      {"version", 1},
      {"alpha", alpha},
      {"t_end", field.tgrid.t_end},
      {"n_steps", field.tgrid.n_steps},
      {"dim", field.sgrid.dim},
      {"box_length", field.sgrid.box_length},
      {"n_points", field.sgrid.n_points},
      {"checksum", checksum_hex(field.values)},
  };
  std::ofstream side(path_base + ".json");
  if (!side) throw SerializationError("cannot open sidecar for writing: " + path_base + ".json");
  side << sidecar.dump(2) << "\n";
}

Field load_field(const std::string& path_base, double* alpha_out) {
  const json sidecar = load_sidecar(path_base + ".json");
  if (sidecar.value("format", "") != "fracdiff-field")
    throw SerializationError("sidecar is not a field: " + path_base);
  const TimeGrid tg(sidecar.at("t_end").get<double>(), sidecar.at("n_steps").get<int>());
  const SpaceGrid sg(sidecar.at("dim").get<int>(), sidecar.at("box_length").get<double>(),
                     sidecar.at("n_points").get<int>());
  const size_t expected = static_cast<size_t>(tg.n_nodes()) * sg.n_total();
  auto payload = read_bytes(path_base + ".bin", expected);
  if (checksum_hex(payload) != sidecar.at("checksum").get<std::string>())
    throw SerializationError("checksum mismatch for " + path_base + ".bin");
  if (alpha_out) *alpha_out = sidecar.at("alpha").get<double>();
  return Field(tg, sg, std::move(payload));
}

}  // namespace fracdiff
