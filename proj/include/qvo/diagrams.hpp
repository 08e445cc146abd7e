#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "qvo/modules.hpp"

namespace qvo {

enum class DiagramMode { Braid, RT, Graded };

const char* mode_name(DiagramMode m);
DiagramMode parse_mode(const std::string& s);

// A strand color: a registered module with an orientation sign, or a bundle of colors.
struct Color {
  std::string module;
  int sign = 1;
  std::vector<Color> bundle;
  bool is_bundle = false;

  static Color leaf(std::string id, int sign = 1);
  static Color bundled(std::vector<Color> parts);
  bool operator==(const Color& o) const;
  bool operator!=(const Color& o) const { return !(*this == o); }
  std::string str() const;
};

using Obj = std::vector<Color>;

// Leaves with bundles expanded and empty bundles removed.
Obj flatten(const Obj& o);
Obj flatten(const Color& c);
std::string obj_str(const Obj& o);

enum class TileKind { Id, Cross, CrossInv, Twist, TwistInv, CapL, CapR, CupL, CupR, Coupon, Zip, Unzip, Src, Snk };

const char* tile_name(TileKind k);

struct Tile {
  TileKind kind = TileKind::Id;
  Color a;          // Cross/CrossInv left input, Twist strand, Cap/Cup module, boundary color
  Color b;          // Cross/CrossInv right input
  Obj obj;          // Id, Zip, Unzip
  std::string name;  // Coupon name or boundary label
  Obj in, out;      // Coupon boundary

  static Tile id(Obj o);
  static Tile cross(Color a, Color b, bool inverse = false);
  static Tile twist(Color a, bool inverse = false);
  static Tile cap(Color v, bool right);
  static Tile cup(Color v, bool right);
  static Tile coupon(std::string name, Obj in, Obj out);
  static Tile zip(Obj o, bool unzip = false);
  static Tile boundary(std::string label, Color c, bool source);

  bool operator==(const Tile& o) const;
};

// Source and target of a single tile (unflattened).
Obj tile_source(const Tile& t);
Obj tile_target(const Tile& t);

struct Diagram {
  DiagramMode mode = DiagramMode::Braid;
  std::vector<std::vector<Tile>> slices;  // bottom to top; slice 0 acts first

  bool operator==(const Diagram& o) const { return mode == o.mode && slices == o.slices; }
};

Obj row_source(const std::vector<Tile>& row);
Obj row_target(const std::vector<Tile>& row);

// Coupon colors and boundary vectors, resolved against a module registry.
// Coupon names may be composites: "A∘B" (B first), "A⊗B", "A*" (dual morphism), and the
// builtins e[V], et[V], i[V], it[V] (duality maps) and c[V,W], ci[V,W] (braiding and inverse).
struct BoundaryData {
  Color color;
  std::vector<Scalar> vec;
};

class ColoringEnv {
 public:
  ColoringEnv(CartanPtr c, QMode mode) : cartan_(std::move(c)), mode_(mode) {}

  // Registers a module; "V*" is resolved automatically as the restricted dual of V.
  void add_module(const std::string& id, ModulePtr m);
  void add_coupon(const std::string& name, GradedMap g);
  void add_boundary(const std::string& label, BoundaryData b);

  ModulePtr module(const std::string& id) const;
  // Module of a leaf color; a negative sign gives the dual (finite modules only).
  ModulePtr leaf_module(const Color& c) const;
  ModulePtr color_module(const Color& c) const;
  std::vector<ModulePtr> obj_modules(const Obj& o) const;
  int obj_dim(const Obj& o) const;
  GradedMap coupon(const std::string& name) const;
  const BoundaryData& boundary(const std::string& label) const;
  bool has_coupon(const std::string& name) const;

  const CartanPtr& cartan() const { return cartan_; }
  const QMode& mode() const { return mode_; }
  std::vector<std::string> module_ids() const;
  std::vector<std::string> coupon_names() const;
  // Memoized derived operator (braidings, twists, duality maps) keyed by a caller-chosen string.
  GradedMap memo(const std::string& key, const std::function<GradedMap()>& make) const;

  // {"modules": {id: spec}, "coupons": {...}, "boundaries": {...}}; H fills in Verma specs without ":H".
  static ColoringEnv from_json(const nlohmann::json& j, const CartanPtr& c, const QMode& mode, int H = 4);
  nlohmann::json to_json() const;

 private:
  CartanPtr cartan_;
  QMode mode_;
  std::map<std::string, ModulePtr> modules_;
  std::map<std::string, std::string> specs_;
  std::map<std::string, GradedMap> coupons_;
  std::map<std::string, BoundaryData> boundaries_;
  std::shared_ptr<std::mutex> mu_ = std::make_shared<std::mutex>();
  mutable std::map<std::string, ModulePtr> duals_;
  mutable std::map<std::string, GradedMap> derived_;
};

Diagram parse_diagram(const std::string& text);
Diagram diagram_from_json(const nlohmann::json& j);
nlohmann::json diagram_to_json(const Diagram& d);
std::string serialize_diagram(const Diagram& d);
Color color_from_json(const nlohmann::json& j);
nlohmann::json color_to_json(const Color& c);
Obj obj_from_json(const nlohmann::json& j);
nlohmann::json obj_to_json(const Obj& o);

struct Boundary {
  Obj source;
  Obj target;
};

Boundary typecheck(const Diagram& d, const ColoringEnv& env);

// Evaluation functor; slices compose as Kronecker rows.
GradedMap evaluate(const Diagram& d, const ColoringEnv& env);

struct DotResult {
  bool equal = false;
  double max_residual = 0.0;
  std::string witness;
};

DotResult dot_equal(const Diagram& a, const Diagram& b, const ColoringEnv& env);

// Vertical stacking (a first, then b) and side-by-side juxtaposition.
Diagram stack(const Diagram& a, const Diagram& b);
Diagram side_by_side(const Diagram& a, const Diagram& b);
Diagram identity_diagram(const Obj& o, DiagramMode mode);

// Expands bundled crossings and twists into single-strand tiles.
Diagram expand_bundles(const Diagram& d);

// Rows taking o to flatten(o) by repeated unzipping, or flatten(o) to o with zip set.
std::vector<std::vector<Tile>> unzip_rows(const Obj& o, bool zip);

// RT diagram -> braid diagram: signed strands become dual modules "V*", cups and caps become coupons.
Diagram desugar(const Diagram& d);

// ---------------------------------------------------------------- moves

struct MoveSpec {
  std::string name;
  int slice = 0;     // slice index (or insertion point)
  int position = 0;  // strand index within the slice boundary
};

// Names of all moves in the library.
const std::vector<std::string>& move_names();
Diagram apply_move(const Diagram& d, const MoveSpec& m, const ColoringEnv& env);
// Every (move, location) at which apply_move succeeds.
std::vector<MoveSpec> applicable_moves(const Diagram& d, const ColoringEnv& env);

struct Palette {
  std::vector<std::string> modules;  // module ids; finite ones may receive caps and cups in RT mode
  std::vector<std::pair<std::string, std::string>> coupons;  // (coupon name, module id) endomorphisms
  DiagramMode mode = DiagramMode::RT;
};

Diagram random_diagram(std::uint64_t seed, int size, const Palette& palette, const ColoringEnv& env);

// Short multi-line text rendering, one slice per line, top slice first.
std::string ascii(const Diagram& d);

}  // namespace qvo
