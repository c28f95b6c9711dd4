#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docsray/corpus.hpp"
#include "docsray/providers.hpp"

namespace docsray {

// Axis-aligned box in page units; y grows downward.
struct BBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double center_x() const { return 0.5 * (x0 + x1); }
  double center_y() const { return 0.5 * (y0 + y1); }
  bool well_formed() const { return x0 < x1 && y0 < y1; }
};

struct LayoutBlock {
  std::string text;
  BBox bbox;
};

struct ImageMeta {
  int width_px = 0;
  int height_px = 0;
  double unique_color_ratio = 0.0;
  double white_ratio = 0.0;
  int drawing_command_count = 0;
  int path_count = 0;
  std::string payload_ref;
  std::optional<ImagePayload> payload;
};

struct RawPage {
  std::size_t index = 0;
  std::vector<LayoutBlock> blocks;
  std::vector<ImageMeta> images;
  std::string page_render_ref;
  std::optional<ImagePayload> page_render;
  // Page width in page units; when absent the horizontal extent of the blocks is used.
  std::optional<double> width;
};

// Thresholds applied in page units.
struct IngestionThresholds {
  static constexpr int kMinGraphicSide = 50;
  static constexpr double kMinUniqueColorRatio = 0.10;
  static constexpr double kMaxWhiteRatio = 0.80;
  static constexpr double kMaxElongation = 10.0;
  static constexpr int kRenderDrawingCommands = 50;
  static constexpr int kRenderPaths = 100;
  static constexpr int kMinDescribedSide = 100;
  static constexpr int kMaxImageSide = 800;
  static constexpr double kMinTableWidth = 100.0;
  static constexpr double kMinTableHeight = 50.0;
  static constexpr std::size_t kMinTableRows = 3;
  static constexpr std::size_t kOcrMinChars = 50;
  static constexpr double kColumnSeparation = 0.25;
  static constexpr double kRowTolerance = 0.40;     // of median block height
  static constexpr double kColumnTolerance = 0.02;  // of page width
};

// Reading order. Two 1-D k-means centroids over block x-centers that are more
// than 25% of the page width apart give two columns (left, then right, each
// top to bottom); otherwise blocks are sorted by (y, x).
std::vector<LayoutBlock> detect_columns(std::span<const LayoutBlock> blocks,
                                        std::optional<double> page_width = std::nullopt);

struct TableRegion {
  BBox bbox;
  std::vector<std::size_t> members;            // indices into the input, ascending
  std::vector<std::vector<std::size_t>> rows;  // member indices per row, left to right
};

std::vector<TableRegion> detect_tables(std::span<const LayoutBlock> blocks,
                                       std::optional<double> page_width = std::nullopt);

// Table rows joined with " | ", one line per row.
std::string linearize_table(std::span<const LayoutBlock> blocks, const TableRegion& table);

enum class GraphicsDecision { keep, drop, render_whole_page };

std::string_view to_string(GraphicsDecision decision);

GraphicsDecision filter_vector_graphics(const ImageMeta& meta);

// Presentation size for an image whose longest side is capped at 800.
std::pair<int, int> downscaled_size(int width, int height);

struct Captions {
  std::vector<std::string> captions;  // one per input image
  std::vector<std::string> warnings;
};

// One caption per image. More than one image uses the multi-image prompt and
// splits the reply on "Figure N:" markers.
Captions describe_visuals(std::span<const ImagePayload> images, const LlmBackend& llm);

// Splits a multi-image reply into `n` captions; nullopt when markers 1..n are not all present.
std::optional<std::vector<std::string>> split_figure_captions(std::string_view reply, std::size_t n);

struct OcrResult {
  std::optional<std::string> text;
  std::vector<std::string> warnings;
};

OcrResult ocr_fallback(const RawPage& page, const LlmBackend& llm);

struct AssembledDocument {
  Document document;
  std::vector<std::string> warnings;
};

AssembledDocument assemble_document(std::string doc_id, std::span<const RawPage> raw,
                                    const LlmBackend& llm);

// One page per delimiter-separated segment.
Document load_plain_text(std::string doc_id, std::string_view text,
                         std::string_view page_delimiter = "\f");

// Paged Layout format (JSON). Payload refs resolve relative to the file's directory.
std::vector<RawPage> load_paged_layout(const std::filesystem::path& path);

// Same format from memory. With no base directory, payload refs are rejected
// and only inline base64 payloads are accepted.
std::vector<RawPage> parse_paged_layout(std::string_view json_text,
                                        const std::optional<std::filesystem::path>& base_dir);

}  // namespace docsray
