// softcp: propagate, solve or check soft-constraint instances.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "softcp/instance.hpp"

namespace {

std::optional<softcp::EditWeights> parse_edit_weights(const std::string& text) {
  softcp::EditWeights w;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> w.substitution >> c1 >> w.insertion >> c2 >> w.deletion) || c1 != ',' || c2 != ',')
    return std::nullopt;
  std::string rest;
  if (in >> rest) return std::nullopt;
  return w;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace softcp::cli;
  CLI::App app{"Soft global constraint propagation and search"};
  app.require_subcommand(1);

  std::string path;
  std::string measure;
  softcp::Cost zmax = -1;
  std::string edit_weights;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("instance", path, "Instance file")->required();
    sub->add_option("--measure", measure, "Override the violation measure of every constraint")
        ->check(CLI::IsMember({"var", "val", "edit", "overflow", "weighted"}));
    sub->add_option("--zmax", zmax, "Cap every cost variable at this value")->check(CLI::NonNegativeNumber);
    sub->add_option("--edit-weights", edit_weights, "Edit weights as sub,ins,del");
  };
  auto* propagate = app.add_subcommand("propagate", "Propagate to a fixpoint and print the domains");
  auto* solve = app.add_subcommand("solve", "Branch and bound on the objective");
  auto* check = app.add_subcommand("check", "Compare each propagator against exhaustive enumeration");
  for (auto* sub : {propagate, solve, check}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  Overrides ov;
  if (!measure.empty()) ov.measure = measure;
  if (zmax >= 0) ov.zmax = zmax;
  if (!edit_weights.empty()) {
    ov.edit_weights = parse_edit_weights(edit_weights);
    if (!ov.edit_weights) {
      std::cerr << "error: --edit-weights expects sub,ins,del\n";
      return kExitInput;
    }
    try {
      ov.edit_weights->validate();
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitInput;
    }
  }

  BuiltModel model;
  try {
    model = build_model(load_instance(path), ov);
  } catch (const ParseError& e) {
    std::cerr << path << ':' << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }

  if (*propagate) return cmd_propagate(model, std::cout);
  if (*solve) return cmd_solve(model, std::cout);
  return cmd_check(model, std::cout);
}
