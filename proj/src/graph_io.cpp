#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "potra/graph.hpp"

namespace potra {

static_assert(std::endian::native == std::endian::little, "array I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic = {'P', 'O', 'T', 'G'};
constexpr std::uint8_t kVersion = 1;
constexpr std::int64_t kHeaderBytes = 24;

struct Header {
  std::uint8_t id_width;
  std::uint8_t orientation;
  std::uint64_t num_vertices;
  std::uint64_t num_edges;
};

std::array<char, kHeaderBytes> encode_header(const Header& h) {
  std::array<char, kHeaderBytes> buf{};
  std::memcpy(buf.data(), kMagic.data(), 4);
  buf[4] = static_cast<char>(kVersion);
  buf[5] = static_cast<char>(h.id_width);
  buf[6] = static_cast<char>(h.orientation);
  std::memcpy(buf.data() + 8, &h.num_vertices, 8);
  std::memcpy(buf.data() + 16, &h.num_edges, 8);
  return buf;
}

template <class T>
void write_array(std::ofstream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

template <class T>
void read_array(std::ifstream& in, T* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(T)));
}

CsrGraph load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::int64_t>(in.tellg());
  in.seekg(0);

  if (file_size < kHeaderBytes) throw GraphError("truncated header", file_size);
  std::array<char, kHeaderBytes> buf{};
  in.read(buf.data(), kHeaderBytes);
  if (std::memcmp(buf.data(), kMagic.data(), 4) != 0) throw GraphError("bad magic", 0);
  if (static_cast<std::uint8_t>(buf[4]) != kVersion) throw GraphError("unsupported version", 4);
  Header h{};
  h.id_width = static_cast<std::uint8_t>(buf[5]);
  h.orientation = static_cast<std::uint8_t>(buf[6]);
  std::memcpy(&h.num_vertices, buf.data() + 8, 8);
  std::memcpy(&h.num_edges, buf.data() + 16, 8);
  if (h.id_width != 4 && h.id_width != 8) throw GraphError("malformed header: id_width", 5);
  if (h.orientation > 1) throw GraphError("malformed header: orientation", 6);
  if (h.id_width == 4 && h.num_vertices > (std::uint64_t{1} << 32)) {
    throw GraphError("malformed header: 4-byte IDs with |V| > 2^32", 8);
  }

  // Sizes in long double to survive absurd header values.
  const long double expected = static_cast<long double>(kHeaderBytes) +
                               (static_cast<long double>(h.num_vertices) + 1) * 8 +
                               static_cast<long double>(h.num_edges) * h.id_width;
  if (static_cast<long double>(file_size) < expected) throw GraphError("truncated file", file_size);
  if (static_cast<long double>(file_size) > expected) {
    throw GraphError("trailing bytes after edges", static_cast<std::int64_t>(expected));
  }
  if (h.num_vertices > (std::uint64_t{1} << 32)) {
    throw GraphError("|V| exceeds the 32-bit in-memory vertex IDs", 8);
  }

  const std::int64_t offsets_at = kHeaderBytes;
  std::vector<EdgeIndex> offsets(h.num_vertices + 1);
  read_array(in, offsets.data(), offsets.size());
  if (offsets[0] != 0) throw GraphError("offsets[0] is not 0", offsets_at);
  for (std::uint64_t i = 1; i < offsets.size(); ++i) {
    if (offsets[i] < offsets[i - 1]) {
      throw GraphError("non-monotone offsets", offsets_at + static_cast<std::int64_t>(8 * i));
    }
  }
  if (offsets.back() != h.num_edges) {
    throw GraphError("offsets[|V|] differs from |E|",
                     offsets_at + static_cast<std::int64_t>(8 * h.num_vertices));
  }

  const std::int64_t edges_at = offsets_at + static_cast<std::int64_t>(8 * offsets.size());
  std::vector<VertexId> edges(h.num_edges);
  auto bad_edge = [&](std::uint64_t i, std::uint64_t id) {
    return GraphError("edge ID " + std::to_string(id) + " >= |V|",
                      edges_at + static_cast<std::int64_t>(i * h.id_width));
  };
  if (h.id_width == 4) {
    read_array(in, edges.data(), edges.size());
    for (std::uint64_t i = 0; i < edges.size(); ++i) {
      if (edges[i] >= h.num_vertices) throw bad_edge(i, edges[i]);
    }
  } else {
    std::vector<std::uint64_t> chunk(std::size_t{1} << 16);
    for (std::uint64_t base = 0; base < edges.size(); base += chunk.size()) {
      const std::uint64_t n = std::min<std::uint64_t>(chunk.size(), edges.size() - base);
      read_array(in, chunk.data(), n);
      for (std::uint64_t j = 0; j < n; ++j) {
        if (chunk[j] >= h.num_vertices) throw bad_edge(base + j, chunk[j]);
        edges[base + j] = static_cast<VertexId>(chunk[j]);
      }
    }
  }
  if (!in) throw IoError("read failed on " + path.string());
  return CsrGraph::adopt(std::move(offsets), std::move(edges), static_cast<Orientation>(h.orientation));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace

int edge_id_width(std::uint64_t num_vertices) {
  return num_vertices <= (std::uint64_t{1} << 32) ? 4 : 8;
}

void store_graph(const CsrGraph& g, const std::filesystem::path& path, StoreOptions options) {
  const int width = options.id_width == 0 ? edge_id_width(g.num_vertices()) : options.id_width;
  if (width != 4 && width != 8) throw IoError("id width must be 4 or 8");
  if (width < edge_id_width(g.num_vertices())) throw IoError("id width too small for |V|");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const auto header = encode_header({static_cast<std::uint8_t>(width),
                                     static_cast<std::uint8_t>(g.orientation()), g.num_vertices(),
                                     g.num_edges()});
  out.write(header.data(), header.size());
  write_array(out, g.offsets().data(), g.offsets().size());
  if (width == 4) {
    write_array(out, g.edges().data(), g.edges().size());
  } else {
    std::vector<std::uint64_t> chunk;
    for (std::size_t base = 0; base < g.edges().size(); base += 1 << 16) {
      const auto part = g.edges().subspan(base, std::min<std::size_t>(1 << 16, g.edges().size() - base));
      chunk.assign(part.begin(), part.end());
      write_array(out, chunk.data(), chunk.size());
    }
  }
  out.flush();
  if (!out) throw IoError("write failed on " + path.string());
}

CsrGraph parse_edge_list(std::string_view text, std::uint64_t num_vertices) {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::uint64_t max_id = 0;
  bool any = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    const auto line_at = static_cast<std::int64_t>(pos);
    pos = end + 1;

    const char* p = line.data();
    const char* e = line.data() + line.size();
    auto skip_space = [&] {
      while (p < e && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    };
    skip_space();
    if (p == e || *p == '#') continue;
    std::uint64_t ids[2];
    for (auto& id : ids) {
      skip_space();
      auto [next, ec] = std::from_chars(p, e, id);
      if (ec != std::errc{}) throw GraphError("malformed edge line", line_at);
      p = next;
    }
    skip_space();
    if (p != e && *p != '#') throw GraphError("malformed edge line", line_at);
    if (std::max(ids[0], ids[1]) >= (std::uint64_t{1} << 32)) {
      throw GraphError("vertex ID exceeds 32 bits", line_at);
    }
    if (num_vertices != 0 && std::max(ids[0], ids[1]) >= num_vertices) {
      throw GraphError("vertex ID >= |V|", line_at);
    }
    max_id = std::max({max_id, ids[0], ids[1]});
    any = true;
    pairs.emplace_back(static_cast<VertexId>(ids[0]), static_cast<VertexId>(ids[1]));
  }
  const std::uint64_t n = num_vertices != 0 ? num_vertices : (any ? max_id + 1 : 0);
  return from_pairs(n, std::move(pairs));
}

CsrGraph load_graph(const std::filesystem::path& path, GraphFormat format) {
  if (format == GraphFormat::kBinary) return load_binary(path);
  return parse_edge_list(read_file(path));
}

CsrGraph load_graph_auto(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  const bool binary = in.gcount() == 4 && magic == kMagic;
  return load_graph(path, binary ? GraphFormat::kBinary : GraphFormat::kEdgeListText);
}

}  // namespace potra
