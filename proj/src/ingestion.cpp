#include "docsray/ingestion.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <boost/beast/core/detail/base64.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "docsray/error.hpp"
#include "docsray/prompts.hpp"
#include "docsray/text.hpp"

namespace docsray {
namespace {

using nlohmann::json;
using T = IngestionThresholds;

ImagePayload presented(const ImagePayload& img) {
  ImagePayload out = img;
  std::tie(out.width, out.height) = downscaled_size(img.width, img.height);
  return out;
}

std::string media_type_for(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  return "image/png";
}

std::string read_file(const std::filesystem::path& p, const std::string& where) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError(fmt::format("{}: cannot read '{}'", where, p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string decode_base64(const std::string& in, const std::string& where) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::decoded_size(in.size()), '\0');
  auto [written, read] = b64::decode(out.data(), in.data(), in.size());
  // beast stops at the padding, so only '=' may remain unread.
  if (in.find_first_not_of('=', read) != std::string::npos || in.size() - read > 2)
    throw ParseError(fmt::format("{}: invalid base64 payload", where));
  out.resize(written);
  return out;
}

// Payload from either a file reference or inline base64.
std::optional<ImagePayload> payload_from(const json& obj, const std::string& ref_key,
                                         const std::string& b64_key, const std::string& where,
                                         const std::optional<std::filesystem::path>& base_dir,
                                         std::string& ref_out) {
  if (obj.contains(b64_key) && !obj[b64_key].is_null()) {
    if (!obj[b64_key].is_string()) throw ParseError(fmt::format("{}.{}: expected string", where, b64_key));
    ImagePayload p;
    p.bytes = decode_base64(obj[b64_key].get<std::string>(), where + "." + b64_key);
    if (obj.contains("media_type") && obj["media_type"].is_string())
      p.media_type = obj["media_type"].get<std::string>();
    return p;
  }
  if (obj.contains(ref_key) && !obj[ref_key].is_null()) {
    if (!obj[ref_key].is_string()) throw ParseError(fmt::format("{}.{}: expected string", where, ref_key));
    ref_out = obj[ref_key].get<std::string>();
    if (ref_out.empty()) return std::nullopt;
    if (!base_dir)
      throw ParseError(fmt::format("{}.{}: file references are not accepted here", where, ref_key));
    const auto path = *base_dir / ref_out;
    ImagePayload p;
    p.bytes = read_file(path, where + "." + ref_key);
    p.media_type = media_type_for(path);
    return p;
  }
  return std::nullopt;
}

template <typename V>
V required(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(fmt::format("{}: missing field '{}'", where, key));
  try {
    return obj.at(key).get<V>();
  } catch (const json::exception&) {
    throw ParseError(fmt::format("{}.{}: wrong type", where, key));
  }
}

template <typename V>
V optional_field(const json& obj, const char* key, V fallback, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<V>();
  } catch (const json::exception&) {
    throw ParseError(fmt::format("{}.{}: wrong type", where, key));
  }
}

}  // namespace

std::optional<std::vector<std::string>> split_figure_captions(std::string_view reply,
                                                              std::size_t n) {
  static const std::regex marker(R"((^|\n)[ \t*#]*Figure[ \t]+(\d+)[ \t]*:)");
  const std::string s(reply);
  std::vector<std::pair<std::size_t, std::size_t>> found;  // (figure number, text start)
  std::vector<std::size_t> starts;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), marker); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    found.emplace_back(std::stoul(m[2].str()), static_cast<std::size_t>(m.position(0) + m.length(0)));
    starts.push_back(static_cast<std::size_t>(m.position(0)));
  }
  std::vector<std::string> out(n);
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < found.size(); ++i) {
    const auto [num, begin] = found[i];
    const std::size_t end = i + 1 < found.size() ? starts[i + 1] : s.size();
    if (num < 1 || num > n || seen[num - 1]) return std::nullopt;
    seen[num - 1] = true;
    out[num - 1] = std::string(text::trim(std::string_view(s).substr(begin, end - begin)));
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) return std::nullopt;
  return out;
}

Captions describe_visuals(std::span<const ImagePayload> images, const LlmBackend& llm) {
  Captions out;
  if (images.empty()) return out;
  for (const auto& img : images) {
    if ((img.width && img.width < T::kMinDescribedSide) || (img.height && img.height < T::kMinDescribedSide))
      throw PreconditionError(fmt::format("image {}x{} is below the {}x{} description threshold",
                                          img.width, img.height, T::kMinDescribedSide,
                                          T::kMinDescribedSide));
  }
  LlmRequest req;
  for (const auto& img : images) req.images.push_back(presented(img));
  if (images.size() == 1) {
    req.user_prompt = std::string(prompts::kSingleImage);
    out.captions.emplace_back(text::trim(complete(llm, req)));
    return out;
  }
  req.user_prompt = prompts::multi_image(images.size());
  const auto reply = complete(llm, req);
  if (auto split = split_figure_captions(reply, images.size())) {
    out.captions = std::move(*split);
  } else {
    out.captions.assign(images.size(), std::string());
    out.captions.front() = std::string(text::trim(reply));
    out.warnings.push_back(fmt::format(
        "could not split captions for {} images on 'Figure N:' markers; reply attached to the first image",
        images.size()));
  }
  return out;
}

OcrResult ocr_fallback(const RawPage& page, const LlmBackend& llm) {
  OcrResult out;
  if (!page.page_render) {
    out.warnings.push_back(fmt::format("page {}: OCR needed but no page render is available", page.index));
    return out;
  }
  LlmRequest req;
  req.user_prompt = std::string(prompts::kOcr);
  req.images.push_back(presented(*page.page_render));
  out.text = std::string(text::trim(complete(llm, req)));
  return out;
}

AssembledDocument assemble_document(std::string doc_id, std::span<const RawPage> raw,
                                    const LlmBackend& llm) {
  AssembledDocument out;
  out.document.doc_id = std::move(doc_id);
  out.document.source_kind = SourceKind::paged_layout;
  if (raw.empty()) throw PreconditionError("no pages to assemble");

  for (std::size_t p = 0; p < raw.size(); ++p) {
    const RawPage& rp = raw[p];
    if (rp.index != p)
      throw PreconditionError(fmt::format("raw page at position {} has index {}", p, rp.index));
    Page page;
    page.index = p;

    // Tables become one linearized block at the table's position.
    const auto tables = detect_tables(rp.blocks, rp.width);
    std::vector<bool> in_table(rp.blocks.size(), false);
    std::vector<LayoutBlock> flow;
    for (const auto& t : tables) {
      for (std::size_t i : t.members) in_table[i] = true;
      flow.push_back({linearize_table(rp.blocks, t), t.bbox});
    }
    for (std::size_t i = 0; i < rp.blocks.size(); ++i)
      if (!in_table[i]) flow.push_back(rp.blocks[i]);

    std::vector<std::string> texts;
    for (const auto& b : detect_columns(flow, rp.width)) {
      if (!text::trim(b.text).empty()) texts.push_back(b.text);
    }
    std::string extracted = text::join(texts, "\n");

    std::vector<ImagePayload> to_describe;
    bool render_page = false;
    for (std::size_t i = 0; i < rp.images.size(); ++i) {
      const auto& img = rp.images[i];
      switch (filter_vector_graphics(img)) {
        case GraphicsDecision::drop: break;
        case GraphicsDecision::render_whole_page: render_page = true; break;
        case GraphicsDecision::keep:
          if (img.width_px < T::kMinDescribedSide || img.height_px < T::kMinDescribedSide) break;
          if (!img.payload) {
            out.warnings.push_back(fmt::format("page {} image {}: no payload, not described", p, i));
            break;
          }
          ImagePayload payload = *img.payload;
          payload.width = img.width_px;
          payload.height = img.height_px;
          to_describe.push_back(std::move(payload));
          break;
      }
    }
    if (render_page) {
      if (rp.page_render)
        to_describe.push_back(*rp.page_render);
      else
        out.warnings.push_back(fmt::format("page {}: complex vector graphics but no page render", p));
    }
    if (!to_describe.empty()) {
      auto caps = describe_visuals(to_describe, llm);
      for (auto& w : caps.warnings) out.warnings.push_back(fmt::format("page {}: {}", p, w));
      for (auto& c : caps.captions)
        if (!c.empty()) page.visual_descriptions.push_back(std::move(c));
    }

    if (text::trim(extracted).size() < T::kOcrMinChars) {
      auto ocr = ocr_fallback(rp, llm);
      out.warnings.insert(out.warnings.end(), ocr.warnings.begin(), ocr.warnings.end());
      if (ocr.text) {
        page.ocr_applied = true;
        if (!ocr.text->empty()) extracted = std::move(*ocr.text);
      }
    }

    page.text = std::move(extracted);
    if (!page.visual_descriptions.empty()) {
      if (!page.text.empty()) page.text += "\n";
      page.text += text::join(page.visual_descriptions, "\n");
    }
    out.document.pages.push_back(std::move(page));
  }
  return out;
}

Document load_plain_text(std::string doc_id, std::string_view input, std::string_view page_delimiter) {
  if (input.empty()) throw PreconditionError("plain text input is empty");
  if (page_delimiter.empty()) page_delimiter = "\f";
  Document doc;
  doc.doc_id = std::move(doc_id);
  doc.source_kind = SourceKind::plain_text;
  std::size_t pos = 0;
  while (true) {
    const auto next = input.find(page_delimiter, pos);
    Page page;
    page.index = doc.pages.size();
    page.text = std::string(input.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    doc.pages.push_back(std::move(page));
    if (next == std::string_view::npos) break;
    pos = next + page_delimiter.size();
  }
  return doc;
}

std::vector<RawPage> parse_paged_layout(std::string_view json_text,
                                        const std::optional<std::filesystem::path>& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("paged layout is not valid JSON: {}", e.what()));
  }
  if (!root.is_object() || !root.contains("pages") || !root["pages"].is_array())
    throw ParseError("paged layout: top-level 'pages' array is required");
  const auto& pages = root["pages"];
  if (pages.empty()) throw ParseError("paged layout: 'pages' is empty");

  std::vector<RawPage> out;
  for (std::size_t p = 0; p < pages.size(); ++p) {
    const auto& jp = pages[p];
    const std::string where = fmt::format("pages[{}]", p);
    if (!jp.is_object()) throw ParseError(where + ": expected object");
    RawPage rp;
    rp.index = required<std::size_t>(jp, "index", where);
    if (rp.index != p)
      throw ParseError(fmt::format("{}.index: expected {}, got {}", where, p, rp.index));
    if (jp.contains("width") && !jp["width"].is_null()) rp.width = required<double>(jp, "width", where);

    if (jp.contains("blocks")) {
      if (!jp["blocks"].is_array()) throw ParseError(where + ".blocks: expected array");
      for (std::size_t b = 0; b < jp["blocks"].size(); ++b) {
        const auto& jb = jp["blocks"][b];
        const std::string bw = fmt::format("{}.blocks[{}]", where, b);
        LayoutBlock block;
        block.text = optional_field<std::string>(jb, "text", "", bw);
        const auto box = required<std::vector<double>>(jb, "bbox", bw);
        if (box.size() != 4) throw ParseError(bw + ".bbox: expected [x0, y0, x1, y1]");
        block.bbox = {box[0], box[1], box[2], box[3]};
        if (!block.bbox.well_formed())
          throw ParseError(fmt::format("{}.bbox: malformed box [{}, {}, {}, {}] (need x0<x1, y0<y1)",
                                       bw, box[0], box[1], box[2], box[3]));
        rp.blocks.push_back(std::move(block));
      }
    }

    if (jp.contains("images")) {
      if (!jp["images"].is_array()) throw ParseError(where + ".images: expected array");
      for (std::size_t i = 0; i < jp["images"].size(); ++i) {
        const auto& ji = jp["images"][i];
        const std::string iw = fmt::format("{}.images[{}]", where, i);
        ImageMeta m;
        m.width_px = required<int>(ji, "width_px", iw);
        m.height_px = required<int>(ji, "height_px", iw);
        m.unique_color_ratio = required<double>(ji, "unique_color_ratio", iw);
        m.white_ratio = required<double>(ji, "white_ratio", iw);
        m.drawing_command_count = optional_field<int>(ji, "drawing_command_count", 0, iw);
        m.path_count = optional_field<int>(ji, "path_count", 0, iw);
        if (m.width_px <= 0 || m.height_px <= 0)
          throw ParseError(iw + ": width_px and height_px must be positive");
        if (m.unique_color_ratio < 0 || m.unique_color_ratio > 1)
          throw ParseError(iw + ".unique_color_ratio: outside [0, 1]");
        if (m.white_ratio < 0 || m.white_ratio > 1) throw ParseError(iw + ".white_ratio: outside [0, 1]");
        if (m.drawing_command_count < 0 || m.path_count < 0)
          throw ParseError(iw + ": drawing_command_count and path_count must be non-negative");
        m.payload = payload_from(ji, "payload_ref", "payload_b64", iw, base_dir, m.payload_ref);
        if (m.payload) {
          m.payload->width = m.width_px;
          m.payload->height = m.height_px;
        }
        rp.images.push_back(std::move(m));
      }
    }
    rp.page_render = payload_from(jp, "page_render_ref", "page_render_b64", where, base_dir,
                                  rp.page_render_ref);
    out.push_back(std::move(rp));
  }
  return out;
}

std::vector<RawPage> load_paged_layout(const std::filesystem::path& path) {
  const auto body = read_file(path, "paged layout");
  auto dir = path.parent_path();
  if (dir.empty()) dir = ".";
  return parse_paged_layout(body, dir);
}

}  // namespace docsray
