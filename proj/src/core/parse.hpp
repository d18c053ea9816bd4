#pragma once

#include <string>
#include <vector>

#include "core/pred.hpp"
#include "core/refine.hpp"
#include "core/rel.hpp"
#include "core/state.hpp"

namespace ivdl {

// Named interval predicate over its own variable universe.
struct PredDef {
    std::string name;
    UniversePtr uni;
    PredPtr term;
};

// Named relation between the state spaces of two systems.
struct RelationDef {
    std::string name;
    int from_sys = -1;
    int to_sys = -1;
    RelPtr term; // left = from_sys vars, right = to_sys vars
};

// One check directive.  sys_a / g describe the left-hand (abstract) side,
// sys_b / h the right-hand (concrete) side; which fields are meaningful
// depends on kind:
//   refinement   sys_a sys_b
//   forward-sim  sys_a sys_b rel
//   simulates    rel g h
//   vdash        rel h
//   ref2         rel g h
struct Directive {
    std::string name;
    std::string kind;
    int sys_a = -1;
    int sys_b = -1;
    int rel = -1;
    PredPtr g;
    PredPtr h;
    std::string proc_a; // source form of g, "SYS.PROC"
    std::string proc_b; // source form of h
};

// A parsed and fully resolved specification file.
struct SpecFile {
    std::string file;
    Carrier carrier;
    UniversePtr observables;                                 // may be empty
    std::vector<std::pair<std::string, std::vector<Value>>> vars; // declaration order
    std::vector<SystemSpec> systems;
    std::vector<RelationDef> relations;
    std::vector<PredDef> preds;
    std::vector<Directive> directives;
};

// Parses source text into a resolved SpecFile.  Throws Error with kind Parse
// for lexical/syntactic problems and Resolve for name or type problems; the
// message starts with "file:line:col:".
SpecFile parse_spec(const std::string& text, const std::string& filename = "<string>");

// Renders a SpecFile back to source.  Program statements have already been
// compiled to interval predicates, so processes are printed in the direct
// `process NAME : pexpr` form; parsing the output yields a structurally
// equal SpecFile.
std::string pretty_print(const SpecFile& spec);

} // namespace ivdl
