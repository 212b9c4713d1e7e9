// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the replay fixtures under cases/ by running the pipeline
// against a scripted backend that answers each tool with the canonical
// artifact for the case. Rerun after changing prompt assets; the request
// hashes embed them.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "leam/pipeline.hpp"

namespace fs = std::filesystem;
using namespace leam;

namespace {

// ---- tiny valid PNGs for the scanned-literature case ----

std::uint32_t crc32(std::string_view data) {
  std::uint32_t crc = 0xffffffffu;
  for (unsigned char c : data) {
    crc ^= c;
    for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0xedb88320u & (~(crc & 1u) + 1u));
  }
  return ~crc;
}

std::uint32_t adler32(std::string_view data) {
  std::uint32_t a = 1, b = 0;
  for (unsigned char c : data) {
    a = (a + c) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

void push_be32(std::string& out, std::uint32_t v) {
  out += static_cast<char>((v >> 24) & 0xff);
  out += static_cast<char>((v >> 16) & 0xff);
  out += static_cast<char>((v >> 8) & 0xff);
  out += static_cast<char>(v & 0xff);
}

void push_chunk(std::string& out, std::string_view type, std::string_view data) {
  push_be32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type);
  body += data;
  out += body;
  push_be32(out, crc32(body));
}

std::string png_1x1(std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t a) {
  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  push_be32(ihdr, 1);  // width
  push_be32(ihdr, 1);  // height
  ihdr += '\x08';      // bit depth
  ihdr += '\x06';      // RGBA
  ihdr += '\x00';
  ihdr += '\x00';
  ihdr += '\x00';
  push_chunk(png, "IHDR", ihdr);

  std::string raw;  // one scanline: filter byte + RGBA
  raw += '\x00';
  raw += static_cast<char>(r);
  raw += static_cast<char>(g);
  raw += static_cast<char>(b);
  raw += static_cast<char>(a);
  std::string idat;
  idat += '\x78';
  idat += '\x01';
  idat += '\x01';  // final stored block
  idat += static_cast<char>(raw.size() & 0xff);
  idat += static_cast<char>((raw.size() >> 8) & 0xff);
  idat += static_cast<char>(~raw.size() & 0xff);
  idat += static_cast<char>((~(raw.size() >> 8)) & 0xff);
  idat += raw;
  push_be32(idat, adler32(raw));
  push_chunk(png, "IDAT", idat);
  push_chunk(png, "IEND", "");
  return png;
}

// ---- case definitions ----

struct CaseDef {
  std::string name;
  Mode mode = Mode::strong;
  std::string description;
  std::vector<ImageInput> images;
  SolidList dims;
  std::string verify;
};

Expr ex(const std::string& text) { return parse_expr(text); }

Solid make_brick(std::string name, Role role, std::string material, std::string x0,
                 std::string x1, std::string y0, std::string y1, std::string z0, std::string z1,
                 std::string position = "") {
  Solid s;
  s.name = std::move(name);
  s.role = role;
  s.material = std::move(material);
  s.position_hint = std::move(position);
  s.shape = BrickSpec{ex(x0), ex(x1), ex(y0), ex(y1), ex(z0), ex(z1)};
  return s;
}

Solid make_cylinder(std::string name, Role role, std::string material, std::string c1,
                    std::string c2, std::string outer, std::string inner, std::string lo,
                    std::string hi, std::string position = "") {
  Solid s;
  s.name = std::move(name);
  s.role = role;
  s.material = std::move(material);
  s.position_hint = std::move(position);
  CylinderSpec c;
  c.axis = Axis::z;
  c.center1 = ex(c1);
  c.center2 = ex(c2);
  c.outer_radius = ex(outer);
  c.inner_radius = ex(inner);
  c.range_min = ex(lo);
  c.range_max = ex(hi);
  s.shape = std::move(c);
  return s;
}

Solid make_extrude(std::string name, Role role, std::string material,
                   std::vector<std::pair<std::string, std::string>> points, std::string base,
                   std::string height, std::string position = "") {
  Solid s;
  s.name = std::move(name);
  s.role = role;
  s.material = std::move(material);
  s.position_hint = std::move(position);
  Extrude2DSpec e;
  e.plane = Plane::xy;
  e.base = ex(base);
  e.height = ex(height);
  for (auto& [px, py] : points) e.points.emplace_back(ex(px), ex(py));
  s.shape = std::move(e);
  return s;
}

CaseDef lslot_case() {
  CaseDef c;
  c.name = "lslot";
  c.mode = Mode::strong;
  c.description =
      "A rectangular copper patch sits on the XY plane with its lower-left corner at the\n"
      "origin: 10 mm along x (PatchW), 8 mm along y (PatchL), 0.035 mm thick. An L-shaped\n"
      "slot is cut through the patch metal. The slot keeps a 2 mm offset (Slot_Offset)\n"
      "from the lower-left corner; its horizontal arm is 6 mm long (Slot2_L) and 1 mm\n"
      "wide (Slot2_W), and its vertical arm is 4 mm tall (Slot1_L) and 1 mm wide\n"
      "(Slot1_W); the arms share the corner square. Keep every dimension parametric with\n"
      "those names. Material: Copper (pure). Subtract the slot from the patch.\n";

  c.dims.dimensioned = true;
  c.dims.parameters.define("PatchW", 10);
  c.dims.parameters.define("PatchL", 8);
  c.dims.parameters.define("Slot1_W", 1);
  c.dims.parameters.define("Slot1_L", 4);
  c.dims.parameters.define("Slot2_W", 1);
  c.dims.parameters.define("Slot2_L", 6);
  c.dims.parameters.define("Slot_Offset", 2);

  c.dims.solids.push_back(make_brick("patch", Role::patch, "Copper (pure)", "0", "PatchW", "0",
                                     "PatchL", "0", "0.035", "patch sheet on the xy plane"));
  c.dims.solids.push_back(make_extrude(
      "slot", Role::slot, "Copper (pure)",
      {{"Slot_Offset", "Slot_Offset"},
       {"Slot_Offset + Slot2_L", "Slot_Offset"},
       {"Slot_Offset + Slot2_L", "Slot_Offset + Slot2_W"},
       {"Slot_Offset + Slot1_W", "Slot_Offset + Slot2_W"},
       {"Slot_Offset + Slot1_W", "Slot_Offset + Slot1_L"},
       {"Slot_Offset", "Slot_Offset + Slot1_L"}},
      "0", "0.035", "L-shaped cut inside the patch"));
  c.dims.boolean_plan.push_back({BoolOp::subtract, "patch", "slot"});
  return c;
}

CaseDef patch245_case() {
  CaseDef c;
  c.name = "patch245";
  c.mode = Mode::weak;
  c.description =
      "Design a rectangular microstrip patch antenna with a rectangular slot in the\n"
      "radiating patch, operating at 2.45 GHz. The description is deliberately short:\n"
      "choose a sensible substrate, ground plane, feed line, and patch dimensions.\n";

  c.dims.dimensioned = true;
  c.dims.parameters.define("PatchW", 38);
  c.dims.parameters.define("PatchL", 28);
  c.dims.parameters.define("SlotW", 2);
  c.dims.parameters.define("SlotL", 10);

  c.dims.solids.push_back(make_brick("substrate", Role::substrate, "FR-4 (lossy)", "0", "60",
                                     "0", "50", "0", "1.6", "FR-4 board"));
  c.dims.solids.push_back(make_brick("ground", Role::ground, "Copper (pure)", "0", "60", "0",
                                     "50", "-0.035", "0", "full ground plane under the board"));
  c.dims.solids.push_back(make_brick(
      "patch", Role::patch, "Copper (pure)", "30 - PatchW / 2", "30 + PatchW / 2",
      "25 - PatchL / 2", "25 + PatchL / 2", "1.6", "1.635", "radiating patch, centered"));
  c.dims.solids.push_back(make_brick(
      "slot", Role::slot, "Copper (pure)", "30 - SlotL / 2", "30 + SlotL / 2",
      "25 - SlotW / 2", "25 + SlotW / 2", "1.6", "1.635", "rectangular slot in the patch"));
  c.dims.solids.push_back(make_brick("feedline", Role::feedline, "Copper (pure)", "28.5", "31.5",
                                     "0", "25 - PatchL / 2", "1.6", "1.635",
                                     "microstrip feed from the board edge"));
  c.dims.boolean_plan.push_back({BoolOp::subtract, "patch", "slot"});
  c.dims.boolean_plan.push_back({BoolOp::add, "patch", "feedline"});
  return c;
}

CaseDef vivaldi_case() {
  CaseDef c;
  c.name = "vivaldi";
  c.mode = Mode::strong;
  c.description =
      "A Vivaldi antenna on a 30 mm x 20 mm board (SL x SW), substrate 0.8 mm thick\n"
      "(SubH) with its front face at z = 0. The front metallization covers the board and\n"
      "carries two cuts: a flared slot bounded by two mirrored splines, and a circular\n"
      "slot of radius r1 centered on the board axis at height gap1 + r1 that terminates\n"
      "the slotline. Each spline has 20 points; the left one passes through (x_i, 21 - i)\n"
      "for i = 1..20 with the twenty x_i values kept as parameters x1..x20, strictly\n"
      "ascending and strictly inside (0, 15). The right spline mirrors it at SL - x_i.\n"
      "Connect the top and bottom spline ends to close the shape, then extrude by the\n"
      "metal thickness 0.035. Start the taper linear: x_i = 0.7 i.\n"
      "On the back face, a two-section feed runs along the board axis: section one is\n"
      "W1 wide and L1 long starting at y = gap2, section two is W2 wide and L2 long\n"
      "continuing to the top edge, plus a circular stub of radius r1 centered at the\n"
      "feed start. SL = 30, SW = 20, SubH = 0.8, r1 = 2, gap1 = 1, L1 = 7, L2 = 8,\n"
      "gap2 = 5, W1 = 2, W2 = 1. Conductors are Copper (pure) on an FR-4 (lossy) board.\n";

  c.dims.dimensioned = true;
  c.dims.parameters.define("SL", 30);
  c.dims.parameters.define("SW", 20);
  c.dims.parameters.define("SubH", 0.8);
  c.dims.parameters.define("r1", 2);
  c.dims.parameters.define("gap1", 1);
  c.dims.parameters.define("L1", 7);
  c.dims.parameters.define("L2", 8);
  c.dims.parameters.define("gap2", 5);
  c.dims.parameters.define("W1", 2);
  c.dims.parameters.define("W2", 1);
  for (int i = 1; i <= 20; ++i)
    c.dims.parameters.define("x" + std::to_string(i), static_cast<double>(i * 7) / 10.0);

  c.dims.solids.push_back(make_brick("substrate", Role::substrate, "FR-4 (lossy)", "0", "SL",
                                     "0", "SW", "-SubH", "0", "board; front face at z = 0"));
  c.dims.solids.push_back(make_brick("front_patch", Role::patch, "Copper (pure)", "0", "SL", "0",
                                     "SW", "0", "0.035", "front metallization"));

  std::vector<std::pair<std::string, std::string>> spline;
  for (int i = 1; i <= 20; ++i)
    spline.emplace_back("x" + std::to_string(i), std::to_string(21 - i));
  for (int i = 20; i >= 1; --i)
    spline.emplace_back("SL - x" + std::to_string(i), std::to_string(21 - i));
  c.dims.solids.push_back(make_extrude("slotline", Role::slot, "Copper (pure)", spline, "0",
                                       "0.035", "flared slot between mirrored splines"));
  c.dims.solids.push_back(make_cylinder("front_circle", Role::slot, "Copper (pure)", "SL / 2",
                                        "gap1 + r1", "r1", "0", "0", "0.035",
                                        "circular slot terminating the slotline"));
  c.dims.solids.push_back(make_brick(
      "back_feed1", Role::feedline, "Copper (pure)", "SL / 2 - W1 / 2", "SL / 2 + W1 / 2",
      "gap2", "gap2 + L1", "-SubH - 0.035", "-SubH", "first feed section on the back"));
  c.dims.solids.push_back(make_brick("back_feed2", Role::feedline, "Copper (pure)",
                                     "SL / 2 - W2 / 2", "SL / 2 + W2 / 2", "gap2 + L1",
                                     "gap2 + L1 + L2", "-SubH - 0.035", "-SubH",
                                     "second feed section reaching the top edge"));
  c.dims.solids.push_back(make_cylinder("back_stub", Role::stub, "Copper (pure)", "SL / 2",
                                        "gap2", "r1", "0", "-SubH - 0.035", "-SubH",
                                        "circular stub at the feed start"));

  c.dims.boolean_plan.push_back({BoolOp::subtract, "front_patch", "slotline"});
  c.dims.boolean_plan.push_back({BoolOp::subtract, "front_patch", "front_circle"});
  c.dims.boolean_plan.push_back({BoolOp::add, "back_feed1", "back_feed2"});
  c.dims.boolean_plan.push_back({BoolOp::add, "back_feed1", "back_stub"});

  c.verify = "symmetry: x = 15\nascending: 0 .. 15 :";
  for (int i = 1; i <= 20; ++i) c.verify += " x" + std::to_string(i);
  c.verify += "\n";
  return c;
}

CaseDef monopole_case() {
  CaseDef c;
  c.name = "monopole";
  c.mode = Mode::strong;
  c.description =
      "Reproduce a slotted circular monopole from a scanned source (topology figure and\n"
      "parameter table attached as images). A coplanar-waveguide feed runs up the front\n"
      "face of the board: the feed strip is M_W wide with gaps M_G to two ground\n"
      "rectangles of width RP_W and height RP_L at the bottom corners. The strip is M_L\n"
      "long and ends at the center of a circular disc radiator of radius DP_R. Two slots\n"
      "are cut into the disc, crossing at its center: a horizontal one SL_H long and a\n"
      "vertical one SL_V long, both SL_T wide. Board: S_W wide, S_L tall, Sub_H thick,\n"
      "metal thickness 0.035. The scanned table reads S_W = 13.43, Sub_H = 0.8,\n"
      "DP_R = 6.58, M_L = 25.08, M_W = 1.2, M_G = 0.3, RP_L = 6.67, RP_W = 5.815,\n"
      "SL_T = 1, SL_V = 7.9, SL_H = 7.9. The printed S_L value carries a typo; use the\n"
      "corrected relation S_L = M_L + DP_R + 0.2 = 31.86. Conductors are Copper (pure)\n"
      "on an FR-4 (lossy) board.\n";
  c.images.push_back({"fig1_monopole_topology.png", png_1x1(30, 30, 30, 255)});
  c.images.push_back({"fig2_monopole_parameters.png", png_1x1(200, 200, 200, 255)});

  c.dims.dimensioned = true;
  c.dims.parameters.define("S_W", 13.43);
  c.dims.parameters.define("S_L", 31.86);
  c.dims.parameters.define("Sub_H", 0.8);
  c.dims.parameters.define("DP_R", 6.58);
  c.dims.parameters.define("M_L", 25.08);
  c.dims.parameters.define("M_W", 1.2);
  c.dims.parameters.define("M_G", 0.3);
  c.dims.parameters.define("RP_L", 6.67);
  c.dims.parameters.define("RP_W", 5.815);
  c.dims.parameters.define("SL_T", 1);
  c.dims.parameters.define("SL_V", 7.9);
  c.dims.parameters.define("SL_H", 7.9);

  c.dims.solids.push_back(make_brick("substrate", Role::substrate, "FR-4 (lossy)", "0", "S_W",
                                     "0", "S_L", "0", "Sub_H", "board"));
  c.dims.solids.push_back(make_cylinder("patch", Role::patch, "Copper (pure)", "S_W / 2", "M_L",
                                        "DP_R", "0", "Sub_H", "Sub_H + 0.035", "disc radiator"));
  c.dims.solids.push_back(make_brick("feedline", Role::feedline, "Copper (pure)", "RP_W + M_G",
                                     "RP_W + M_G + M_W", "0", "M_L", "Sub_H", "Sub_H + 0.035",
                                     "CPW strip up to the disc center"));
  c.dims.solids.push_back(make_brick("ground_left", Role::ground, "Copper (pure)", "0", "RP_W",
                                     "0", "RP_L", "Sub_H", "Sub_H + 0.035",
                                     "left coplanar ground"));
  c.dims.solids.push_back(make_brick("ground_right", Role::ground, "Copper (pure)",
                                     "S_W - RP_W", "S_W", "0", "RP_L", "Sub_H", "Sub_H + 0.035",
                                     "right coplanar ground"));
  c.dims.solids.push_back(make_brick(
      "slot_h", Role::slot, "Copper (pure)", "S_W / 2 - SL_H / 2", "S_W / 2 + SL_H / 2",
      "M_L - SL_T / 2", "M_L + SL_T / 2", "Sub_H", "Sub_H + 0.035", "horizontal slot"));
  c.dims.solids.push_back(make_brick(
      "slot_v", Role::slot, "Copper (pure)", "S_W / 2 - SL_T / 2", "S_W / 2 + SL_T / 2",
      "M_L - SL_V / 2", "M_L + SL_V / 2", "Sub_H", "Sub_H + 0.035", "vertical slot"));

  c.dims.boolean_plan.push_back({BoolOp::add, "patch", "feedline"});
  c.dims.boolean_plan.push_back({BoolOp::subtract, "patch", "slot_h"});
  c.dims.boolean_plan.push_back({BoolOp::subtract, "patch", "slot_v"});

  c.verify = "constraint: S_L = M_L + DP_R + 0.2\n";
  return c;
}

// Answers each tool with the canonical artifact for the case, the way a
// perfectly behaved model would, with realistic code fencing.
class ScriptedBackend : public LlmBackend {
 public:
  ScriptedBackend(const CaseDef& def, const MaterialCatalog& catalog)
      : def_(def), catalog_(catalog) {}

  std::string invoke(const AssembledPrompt& prompt) override {
    auto kind = tool_from_name(prompt.tool);
    if (!kind) throw Error(Errc::backend_error, "unknown tool " + prompt.tool);
    switch (*kind) {
      case ToolKind::weak_d2s:
      case ToolKind::strong_d2s: {
        SolidList stage1 = def_.dims;
        stage1.dimensioned = false;
        stage1.parameters = ParamEnv{};
        stage1.boolean_plan.clear();
        return fence("", serialize_solid_list(stage1));
      }
      case ToolKind::parameterize:
        return fence("vba", emit_macro_text(emit_para(def_.dims.parameters)));
      case ToolKind::dimension:
        return serialize_solid_list(def_.dims);  // unfenced on purpose
      case ToolKind::materials:
        return fence("vba", emit_macro_text(emit_materials(def_.dims.materials_used(), catalog_)));
      case ToolKind::model3d:
        return fence("vba", emit_macro_text(emit_3d(def_.dims)));
      case ToolKind::model2dplus:
        return fence("vba", emit_macro_text(emit_2dplus(def_.dims)));
      case ToolKind::boolean_plan:
        return fence("vba", emit_macro_text(emit_boolean(def_.dims.boolean_plan, def_.dims)));
      case ToolKind::update_para:
        throw Error(Errc::backend_error, "UpdatePara is not scripted");
    }
    throw Error(Errc::backend_error, "unhandled tool");
  }

  std::string describe() const override { return "scripted:" + def_.name; }

 private:
  static std::string fence(const std::string& lang, const std::string& body) {
    return "```" + lang + "\n" + body + "```\n";
  }

  const CaseDef& def_;
  const MaterialCatalog& catalog_;
};

void write_case(const CaseDef& def, const fs::path& out_root, const fs::path& assets_dir,
                const fs::path& catalog_path) {
  fs::path case_dir = out_root / def.name;
  fs::create_directories(case_dir);
  write_file(case_dir / "description.txt", def.description);
  if (!def.verify.empty()) write_file(case_dir / "verify.txt", def.verify);
  if (!def.images.empty()) {
    fs::create_directories(case_dir / "images");
    for (const ImageInput& img : def.images)
      write_file(case_dir / "images" / img.name, img.bytes);
  }

  MaterialCatalog catalog = MaterialCatalog::from_file(catalog_path);
  ScriptedBackend backend(def, catalog);

  fs::path work = fs::temp_directory_path() / ("leam-fixgen-" + def.name);
  fs::remove_all(work);
  PipelineConfig cfg;
  cfg.workspace = work;
  cfg.assets_dir = assets_dir;
  cfg.catalog_path = catalog_path;
  PipelineState state = run_pipeline(def.description, def.images, def.mode, backend, cfg);

  for (const ToolTranscript& t : state.transcripts) {
    char seq[8];
    std::snprintf(seq, sizeof seq, "%02d", t.sequence);
    write_file(case_dir / (std::string(seq) + "_" + t.tool + ".request.txt"), t.request_text);
    write_file(case_dir / (std::string(seq) + "_" + t.tool + ".response.txt"), t.response_text);
  }

  // Self-check: a strict replay must reproduce identical artifacts.
  ReplayBackend replay(case_dir);
  fs::path work2 = fs::temp_directory_path() / ("leam-fixgen-replay-" + def.name);
  fs::remove_all(work2);
  PipelineConfig cfg2 = cfg;
  cfg2.workspace = work2;
  PipelineState state2 = run_pipeline(def.description, def.images, def.mode, replay, cfg2);
  for (const auto& [kind, text] : state.artifacts.items())
    if (state2.artifacts.get(kind) != text)
      throw Error(Errc::validation_failed,
                  def.name + ": replay produced different bytes for " +
                      std::string(artifact_filename(kind)));
  fs::remove_all(work);
  fs::remove_all(work2);

  std::cout << def.name << ": " << artifact_summary(state.dims) << ", "
            << state.transcripts.size() << " transcripts\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regenerate the replay fixtures under cases/"};
  std::string out_dir = "cases";
  std::string assets_dir = "assets";
  std::string catalog_path;
  app.add_option("--out", out_dir, "output root")->capture_default_str();
  app.add_option("--assets", assets_dir, "prompt asset directory")->capture_default_str();
  app.add_option("--catalog", catalog_path, "material catalog file");
  CLI11_PARSE(app, argc, argv);
  if (catalog_path.empty()) catalog_path = assets_dir + "/materials.catalog";

  try {
    for (const CaseDef& def :
         {lslot_case(), patch245_case(), vivaldi_case(), monopole_case()}) {
      write_case(def, out_dir, assets_dir, catalog_path);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
