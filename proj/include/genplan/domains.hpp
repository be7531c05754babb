#pragma once

// Generators for the benchmark generalized-planning problems. Integer
// variables are encoded propositionally (one v_eq_a fluent per value) with
// saturating inc/dec/add/assign actions; selected comparisons between
// variables are kept consistent by conditional effects on every action that
// can change either side.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "genplan/model.hpp"

namespace genplan {

struct TrackedComparison {
    FluentId fluent = kNoFluent;
    std::string x;
    std::string y;      // variable name when !y_is_const
    int y_const = 0;
    bool lt = false;    // false: equality
    bool y_is_const = false;
};

struct IntFamily {
    int lo = 0;
    std::vector<FluentId> eq; // eq[v - lo]
};

struct SubtaskDef {
    std::string proc_name;          // p1, p2, ...
    std::vector<ProcParam> params;  // procedure signature
    GeneralizedProblem gp;          // shares the overall core
    int suggested_lines = 4;
};

struct SubtaskSuite {
    std::vector<SubtaskDef> subtasks;
};

struct DomainRecipe {
    std::string name;
    GeneralizedProblem gp;
    std::optional<SubtaskSuite> subtasks;
    std::optional<GeneralizedProblem> holdout; // separate, larger core
    std::vector<TrackedComparison> tracked;
    std::map<std::string, IntFamily> int_vars;
};

// A binary tree shape: children[u] = (left, right), -1 for none; node 0 is
// the root and every listed node must be reachable from it.
struct TreeShape {
    std::vector<std::pair<int, int>> children;
};

DomainRecipe make_grid_to_origin(int width, int height,
                                 const std::vector<std::pair<int, int>>& starts);
// cases: {x0, y0, xg, yg} per instance
DomainRecipe make_grid_nav(int width, int height,
                           const std::vector<std::array<int, 4>>& cases);
// n is the largest coordinate; the corners are (0,0), (0,n), (n,0), (n,n)
DomainRecipe make_hall_a(int n, const std::vector<std::pair<int, int>>& starts);
DomainRecipe make_visit_all(const std::vector<std::pair<int, int>>& sizes);
DomainRecipe make_summatory(const std::vector<int>& values);
DomainRecipe make_fibonacci(const std::vector<int>& values);
DomainRecipe make_reverse(const std::vector<std::vector<int>>& lists);
DomainRecipe make_sorting(const std::vector<std::vector<int>>& lists);
DomainRecipe make_list_visit(const std::vector<int>& lengths);
DomainRecipe make_tree_dfs(const std::vector<TreeShape>& trees);

// CLI entry: recipe by name with "key=value" parameters; unknown names or
// out-of-range parameters throw BadConfigError.
DomainRecipe make_domain(const std::string& name,
                         const std::map<std::string, std::string>& params);

std::vector<std::string> domain_names();

// Minimal core with the given integer variables (name, max; values 0..max),
// inc_<v>/dec_<v> actions and tracked comparisons. Exposed so the encoding
// itself can be probed in isolation.
struct ComparisonSpec {
    std::string x;
    std::string y;
    bool lt = false;
    bool y_is_const = false;
    int y_const = 0;
};
CorePtr make_int_var_core(const std::vector<std::pair<std::string, int>>& vars,
                          const std::vector<ComparisonSpec>& tracked,
                          std::vector<TrackedComparison>* tracked_out = nullptr);

} // namespace genplan
