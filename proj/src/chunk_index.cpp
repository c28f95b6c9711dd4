#include "docsray/chunk_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <zlib.h>

#include "docsray/error.hpp"
#include "docsray/text.hpp"

namespace docsray {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "DOCSRAY-INDEX";
constexpr std::size_t kPayloadAlignment = 64;

double norm_of(std::span<const float> v) {
  double ss = 0.0;
  for (float x : v) ss += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(ss);
}

void put_f32_le(std::string& out, float f) {
  const auto u = std::bit_cast<std::uint32_t>(f);
  out.push_back(static_cast<char>(u & 0xFF));
  out.push_back(static_cast<char>((u >> 8) & 0xFF));
  out.push_back(static_cast<char>((u >> 16) & 0xFF));
  out.push_back(static_cast<char>((u >> 24) & 0xFF));
}

float get_f32_le(const unsigned char* p) {
  const std::uint32_t u = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                          (static_cast<std::uint32_t>(p[2]) << 16) |
                          (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(u);
}

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos), n);
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<float> content_mean_f32(const IndexedCorpus& c, const IndexedSection& s) {
  std::vector<double> acc(c.dim(), 0.0);
  for (std::size_t j = 0; j < s.chunk_count; ++j) {
    auto row = c.chunk_embeddings.row(s.chunk_begin + j);
    for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += static_cast<double>(row[d]);
  }
  std::vector<float> out(acc.size());
  const double inv = 1.0 / static_cast<double>(s.chunk_count);
  for (std::size_t d = 0; d < acc.size(); ++d) out[d] = static_cast<float>(acc[d] * inv);
  return out;
}

}  // namespace

void ChunkingParams::validate() const {
  if (window_tokens == 0) throw PreconditionError("chunking: window must be positive");
  if (overlap_tokens >= window_tokens)
    throw PreconditionError("chunking: overlap must be smaller than the window");
  if (min_tail_tokens > window_tokens)
    throw PreconditionError("chunking: min_tail must not exceed the window");
}

std::string ChunkingParams::fingerprint() const {
  return fmt::format("window={};overlap={};min_tail={}", window_tokens, overlap_tokens,
                     min_tail_tokens);
}

std::vector<std::pair<std::size_t, std::size_t>> window_spans(std::size_t token_count,
                                                              const ChunkingParams& params) {
  params.validate();
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t start = 0; start < token_count; start += params.stride()) {
    const std::size_t end = std::min(start + params.window_tokens, token_count);
    spans.emplace_back(start, end);
    if (end == token_count) break;
  }
  if (spans.size() > 1) {
    const auto [s, e] = spans.back();
    if (e - s < params.min_tail_tokens) {
      spans.pop_back();
      spans.back().second = e;
    }
  }
  return spans;
}

std::vector<ChunkSpan> chunk_section(std::string_view section_text, const ChunkingParams& params,
                                     const Tokenizer& tokenizer) {
  const auto tokens = tokenizer.split(section_text);
  std::vector<ChunkSpan> out;
  for (const auto& [s, e] : window_spans(tokens.size(), params))
    out.push_back({s, e, tokens[s].begin, tokens[e - 1].end});
  return out;
}

std::vector<double> mean_of(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw PreconditionError("mean of zero vectors");
  std::vector<double> acc(rows.front().size(), 0.0);
  for (const auto& r : rows) {
    if (r.size() != acc.size()) throw DimensionMismatch("mean_of: rows differ in length");
    for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += r[d];
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& x : acc) x *= inv;
  return acc;
}

SectionRepresentation compute_section_representation(
    std::string_view title, std::span<const std::vector<double>> chunk_embeddings,
    const FusionConfig& fusion) {
  SectionRepresentation rep;
  rep.title = embed_text(title, fusion);
  if (chunk_embeddings.empty()) {
    rep.content = rep.title.values;
    rep.content_from_title = true;
  } else {
    rep.content = mean_of(chunk_embeddings);
    if (rep.content.size() != rep.title.dim())
      throw DimensionMismatch("chunk and title embeddings differ in dimension");
  }
  return rep;
}

std::vector<double> EmbeddingMatrix::row_f64(std::size_t i) const {
  auto r = row(i);
  return {r.begin(), r.end()};
}

void EmbeddingMatrix::append(std::span<const double> v) {
  if (v.size() != dim_)
    throw DimensionMismatch(fmt::format("matrix row has {} components, expected {}", v.size(), dim_));
  for (double x : v) data_.push_back(static_cast<float>(x));
}

void EmbeddingMatrix::append(std::span<const float> v) {
  if (v.size() != dim_)
    throw DimensionMismatch(fmt::format("matrix row has {} components, expected {}", v.size(), dim_));
  data_.insert(data_.end(), v.begin(), v.end());
}

IndexFingerprints current_fingerprints(const Tokenizer& tokenizer, const FusionConfig& fusion,
                                       const ChunkingParams& chunking) {
  return {std::string(tokenizer.id()), fusion.fingerprint(), chunking.fingerprint()};
}

std::vector<std::size_t> IndexedCorpus::chunks_per_section() const {
  std::vector<std::size_t> out;
  out.reserve(sections.size());
  for (const auto& s : sections) out.push_back(s.chunk_count);
  return out;
}

void IndexedCorpus::refresh_derived() {
  content_norms.clear();
  for (std::size_t i = 0; i < content_embeddings.rows(); ++i)
    content_norms.push_back(norm_of(content_embeddings.row(i)));
}

void IndexedCorpus::validate() const {
  const std::size_t d = dim();
  if (d == 0) throw IndexFormatError("index has zero embedding dimension");
  if (title_embeddings.dim() != d || content_embeddings.dim() != d)
    throw IndexFormatError("embedding dimensions are not uniform");
  if (title_embeddings.rows() != sections.size() || content_embeddings.rows() != sections.size())
    throw IndexFormatError("section embedding count does not match section count");
  if (chunk_embeddings.rows() != chunks.size())
    throw IndexFormatError("chunk embedding count does not match chunk count");
  if (sections.empty()) throw IndexFormatError("index has no sections");

  std::size_t expected_begin = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    const auto& s = sections[i];
    if (s.section.index != i) throw IndexFormatError(fmt::format("section {} is out of order", i));
    if (s.chunk_begin != expected_begin)
      throw IndexFormatError(fmt::format("section {} chunk range is not contiguous", i));
    for (std::size_t j = 0; j < s.chunk_count; ++j) {
      const auto& c = chunks.at(s.chunk_begin + j);
      if (c.section_index != i || c.chunk_index != j)
        throw IndexFormatError(fmt::format("chunk '{}' references the wrong section", c.id));
    }
    expected_begin += s.chunk_count;
    total += s.chunk_count;
    if (s.content_from_title != (s.chunk_count == 0))
      throw IndexFormatError(fmt::format("section {} content source flag is inconsistent", i));
    const auto content = content_embeddings.row(i);
    if (s.chunk_count == 0) {
      const auto t = title_embeddings.row(i);
      if (!std::equal(t.begin(), t.end(), content.begin()))
        throw IndexFormatError(fmt::format("section {} content differs from its title embedding", i));
    } else {
      const auto mean = content_mean_f32(*this, s);
      if (!std::equal(mean.begin(), mean.end(), content.begin()))
        throw IndexFormatError(fmt::format("section {} content is not the mean of its chunks", i));
    }
  }
  if (total != chunks.size()) throw IndexFormatError("N differs from the sum of N_s");
}

bool IndexedCorpus::operator==(const IndexedCorpus& o) const {
  return doc_id == o.doc_id && source_kind == o.source_kind && page_count == o.page_count &&
         toc_generator == o.toc_generator && sections == o.sections && chunks == o.chunks &&
         title_embeddings == o.title_embeddings && content_embeddings == o.content_embeddings &&
         chunk_embeddings == o.chunk_embeddings && fingerprints == o.fingerprints;
}

IndexedCorpus build_index(const Document& doc, const PseudoToc& toc, const ChunkingParams& params,
                          const FusionConfig& fusion, const Tokenizer& tokenizer) {
  doc.validate();
  params.validate();
  if (toc.doc_id != doc.doc_id)
    throw PreconditionError(
        fmt::format("TOC belongs to '{}', not to '{}'", toc.doc_id, doc.doc_id));
  check_partition(toc.sections, doc.pages.size());

  const std::size_t d = fusion.output_dim();
  IndexedCorpus c;
  c.doc_id = doc.doc_id;
  c.source_kind = doc.source_kind;
  c.page_count = doc.pages.size();
  c.toc_generator = toc.llm_id;
  c.title_embeddings = EmbeddingMatrix(d);
  c.content_embeddings = EmbeddingMatrix(d);
  c.chunk_embeddings = EmbeddingMatrix(d);
  c.fingerprints = current_fingerprints(tokenizer, fusion, params);

  for (const auto& sec : toc.sections) {
    IndexedSection is;
    is.section = sec;
    is.text = doc.text_of(sec.page_start, sec.page_end);
    is.chunk_begin = c.chunks.size();

    std::vector<std::vector<double>> stored;
    for (const auto& span : chunk_section(is.text, params, tokenizer)) {
      IndexedChunk ch;
      ch.section_index = sec.index;
      ch.chunk_index = is.chunk_count++;
      ch.id = make_chunk_id(doc.doc_id, sec.index, ch.chunk_index);
      ch.token_start = span.token_start;
      ch.token_end = span.token_end;
      ch.text = is.text.substr(span.byte_begin, span.byte_end - span.byte_begin);
      c.chunk_embeddings.append(std::span<const double>(embed_text(ch.text, fusion).values));
      // The mean is taken over what is stored, so it can be re-checked after loading.
      stored.push_back(c.chunk_embeddings.row_f64(c.chunk_embeddings.rows() - 1));
      c.chunks.push_back(std::move(ch));
    }

    const auto rep = compute_section_representation(sec.title, stored, fusion);
    is.content_from_title = rep.content_from_title;
    c.title_embeddings.append(std::span<const double>(rep.title.values));
    if (rep.content_from_title)
      c.content_embeddings.append(c.title_embeddings.row(c.title_embeddings.rows() - 1));
    else
      c.content_embeddings.append(std::span<const double>(rep.content));
    c.sections.push_back(std::move(is));
  }
  if (c.chunks.empty())
    throw PreconditionError(fmt::format("document '{}' has no indexable text", doc.doc_id));
  c.refresh_derived();
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Container: magic line, one-line JSON header, JSON metadata padded so the
// float payload starts on a 64-byte boundary, then little-endian float32 rows
// (titles S x d, contents S x d, chunks N x d). The CRC-32 covers metadata
// and payload.

std::string serialize_index(const IndexedCorpus& c) {
  c.validate();
  json sections = json::array();
  for (const auto& s : c.sections) {
    sections.push_back({{"section_id", s.section.id},
                        {"index", s.section.index},
                        {"title", s.section.title},
                        {"page_start", s.section.page_start},
                        {"page_end", s.section.page_end},
                        {"text", s.text},
                        {"chunk_begin", s.chunk_begin},
                        {"chunk_count", s.chunk_count},
                        {"content_from_title", s.content_from_title}});
  }
  json chunks = json::array();
  for (const auto& ch : c.chunks) {
    chunks.push_back({{"chunk_id", ch.id},
                      {"section_index", ch.section_index},
                      {"chunk_index", ch.chunk_index},
                      {"token_start", ch.token_start},
                      {"token_end", ch.token_end},
                      {"text", ch.text}});
  }
  const json meta = {{"doc_id", c.doc_id},
                     {"source_kind", std::string(to_string(c.source_kind))},
                     {"page_count", c.page_count},
                     {"toc_generator", c.toc_generator},
                     {"sections", sections},
                     {"chunks", chunks}};
  std::string meta_bytes = meta.dump();

  std::string payload;
  payload.reserve((2 * c.sections.size() + c.chunks.size()) * c.dim() * 4);
  for (const auto* m : {&c.title_embeddings, &c.content_embeddings, &c.chunk_embeddings})
    for (float f : m->data()) put_f32_le(payload, f);

  // Header length depends on the offsets it records; iterate to a fixed point.
  std::string head;
  std::size_t padding = 0;
  for (int round = 0; round < 4; ++round) {
    const std::size_t meta_offset = std::string(kMagic).size() + 4 + head.size();
    const std::size_t payload_offset = meta_offset + meta_bytes.size() + padding;
    const std::string crc_input = meta_bytes + std::string(padding, ' ') + payload;
    const json header = {
        {"version", kIndexFormatVersion},
        {"doc_id", c.doc_id},
        {"dim", c.dim()},
        {"dtype", "f32"},
        {"byte_order", "little"},
        {"counts",
         {{"sections", c.section_count()},
          {"chunks", c.total_chunks()},
          {"chunks_per_section", c.chunks_per_section()}}},
        {"fingerprints",
         {{"tokenizer", c.fingerprints.tokenizer},
          {"fusion", c.fingerprints.fusion},
          {"chunking", c.fingerprints.chunking}}},
        {"meta_bytes", meta_bytes.size() + padding},
        {"payload_offset", payload_offset},
        {"payload_bytes", payload.size()},
        {"crc32", fmt::format("{:08x}", crc_of(crc_input))},
    };
    std::string next = header.dump() + "\n";
    const std::size_t new_meta_offset = std::string(kMagic).size() + 4 + next.size();
    const std::size_t unpadded_end = new_meta_offset + meta_bytes.size();
    const std::size_t new_padding =
        (kPayloadAlignment - unpadded_end % kPayloadAlignment) % kPayloadAlignment;
    if (next == head && new_padding == padding) break;
    head = std::move(next);
    padding = new_padding;
  }

  std::string out = fmt::format("{} v{}\n", kMagic, kIndexFormatVersion);
  out += head;
  out += meta_bytes;
  out.append(padding, ' ');
  out += payload;
  return out;
}

IndexedCorpus deserialize_index(std::string_view bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos || !text::starts_with(bytes, kMagic))
    throw IndexFormatError("not an index file");
  const auto tag = bytes.substr(0, nl);
  const auto expected_tag = fmt::format("{} v{}", kMagic, kIndexFormatVersion);
  if (tag != expected_tag)
    throw VersionMismatch(fmt::format("index format '{}' is not supported (expected '{}')", tag,
                                      expected_tag));

  const auto header_end = bytes.find('\n', nl + 1);
  if (header_end == std::string_view::npos) throw ChecksumError("index header is truncated");
  json header;
  try {
    header = json::parse(bytes.substr(nl + 1, header_end - nl - 1));
  } catch (const json::exception&) {
    throw ChecksumError("index header is corrupt");
  }

  std::size_t dim = 0, meta_bytes = 0, payload_offset = 0, payload_bytes = 0, n_sections = 0,
              n_chunks = 0;
  std::string crc_hex;
  IndexFingerprints fp;
  try {
    if (header.at("version").get<int>() != kIndexFormatVersion)
      throw VersionMismatch(
          fmt::format("index header version {} is not supported", header.at("version").dump()));
    if (header.at("dtype") != "f32" || header.at("byte_order") != "little")
      throw IndexFormatError("unsupported payload encoding");
    dim = header.at("dim").get<std::size_t>();
    meta_bytes = header.at("meta_bytes").get<std::size_t>();
    payload_offset = header.at("payload_offset").get<std::size_t>();
    payload_bytes = header.at("payload_bytes").get<std::size_t>();
    n_sections = header.at("counts").at("sections").get<std::size_t>();
    n_chunks = header.at("counts").at("chunks").get<std::size_t>();
    crc_hex = header.at("crc32").get<std::string>();
    fp.tokenizer = header.at("fingerprints").at("tokenizer").get<std::string>();
    fp.fusion = header.at("fingerprints").at("fusion").get<std::string>();
    fp.chunking = header.at("fingerprints").at("chunking").get<std::string>();
  } catch (const json::exception& e) {
    throw ChecksumError(fmt::format("index header is corrupt: {}", e.what()));
  }

  const std::size_t meta_offset = header_end + 1;
  if (meta_offset + meta_bytes != payload_offset || bytes.size() != payload_offset + payload_bytes)
    throw ChecksumError(fmt::format("index is truncated or has trailing data ({} bytes, expected {})",
                                    bytes.size(), payload_offset + payload_bytes));
  if (fmt::format("{:08x}", crc_of(bytes.substr(meta_offset))) != crc_hex)
    throw ChecksumError("index checksum mismatch");
  if (payload_bytes != (2 * n_sections + n_chunks) * dim * 4)
    throw IndexFormatError("payload size does not match the recorded counts");

  IndexedCorpus c;
  c.fingerprints = std::move(fp);
  try {
    const auto meta = json::parse(bytes.substr(meta_offset, meta_bytes));
    c.doc_id = meta.at("doc_id").get<std::string>();
    c.source_kind = meta.at("source_kind") == "paged_layout" ? SourceKind::paged_layout
                                                              : SourceKind::plain_text;
    c.page_count = meta.at("page_count").get<std::size_t>();
    c.toc_generator = meta.at("toc_generator").get<std::string>();
    for (const auto& js : meta.at("sections")) {
      IndexedSection s;
      s.section.id = js.at("section_id").get<std::string>();
      s.section.index = js.at("index").get<std::size_t>();
      s.section.title = js.at("title").get<std::string>();
      s.section.page_start = js.at("page_start").get<std::size_t>();
      s.section.page_end = js.at("page_end").get<std::size_t>();
      s.text = js.at("text").get<std::string>();
      s.chunk_begin = js.at("chunk_begin").get<std::size_t>();
      s.chunk_count = js.at("chunk_count").get<std::size_t>();
      s.content_from_title = js.at("content_from_title").get<bool>();
      c.sections.push_back(std::move(s));
    }
    for (const auto& jc : meta.at("chunks")) {
      IndexedChunk ch;
      ch.id = jc.at("chunk_id").get<std::string>();
      ch.section_index = jc.at("section_index").get<std::size_t>();
      ch.chunk_index = jc.at("chunk_index").get<std::size_t>();
      ch.token_start = jc.at("token_start").get<std::size_t>();
      ch.token_end = jc.at("token_end").get<std::size_t>();
      ch.text = jc.at("text").get<std::string>();
      c.chunks.push_back(std::move(ch));
    }
  } catch (const json::exception& e) {
    throw IndexFormatError(fmt::format("index metadata is malformed: {}", e.what()));
  }
  if (c.sections.size() != n_sections || c.chunks.size() != n_chunks)
    throw IndexFormatError("metadata counts disagree with the header");

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + payload_offset);
  for (auto* m : {&c.title_embeddings, &c.content_embeddings, &c.chunk_embeddings}) {
    const std::size_t rows = m == &c.chunk_embeddings ? n_chunks : n_sections;
    *m = EmbeddingMatrix(dim);
    m->data().resize(rows * dim);
    for (auto& f : m->data()) {
      f = get_f32_le(p);
      p += 4;
    }
  }
  c.validate();
  c.refresh_derived();
  return c;
}

void save_index(const IndexedCorpus& corpus, const std::filesystem::path& path) {
  const auto bytes = serialize_index(corpus);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(fmt::format("write to '{}' failed", tmp));
  }
  std::filesystem::rename(tmp, path);
}

LoadedIndex load_index(const std::filesystem::path& path,
                       const std::optional<IndexFingerprints>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexFormatError(fmt::format("cannot read index '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  LoadedIndex out{deserialize_index(ss.str()), {}};
  if (expected) {
    const auto& have = out.corpus.fingerprints;
    if (have.tokenizer != expected->tokenizer)
      out.warnings.push_back(fmt::format("index tokenizer '{}' differs from configured '{}'",
                                         have.tokenizer, expected->tokenizer));
    if (have.fusion != expected->fusion)
      out.warnings.push_back(fmt::format("index embedding space '{}' differs from configured '{}'",
                                         have.fusion, expected->fusion));
    if (have.chunking != expected->chunking)
      out.warnings.push_back(fmt::format("index chunking '{}' differs from configured '{}'",
                                         have.chunking, expected->chunking));
  }
  return out;
}

std::string default_index_path(std::string_view doc_id) {
  return fmt::format("{}.docsray-index", doc_id);
}

}  // namespace docsray
