// Command-line front end: parsing, model checking, satisfiability, proof
// verification, and the tree constructions, over the JSON file formats.

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "topodep/checker.hpp"
#include "topodep/formula.hpp"
#include "topodep/model.hpp"
#include "topodep/model_io.hpp"
#include "topodep/proofs.hpp"
#include "topodep/sat.hpp"
#include "topodep/unravel.hpp"

using nlohmann::ordered_json;
using namespace topodep;

namespace {

BetaSet parse_betas(const std::string& text) {
    BetaSet b;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',') {
            if (!cur.empty()) b.values.push_back(Rat::parse(cur));
            cur.clear();
        } else if (!isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    std::sort(b.values.begin(), b.values.end());
    return b;
}

void emit(const ordered_json& j, bool json_mode, const std::string& text) {
    if (json_mode)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

ordered_json report_json(const ValidationReport& rep) {
    ordered_json out;
    out["ok"] = rep.ok();
    ordered_json v = ordered_json::array();
    for (const auto& viol : rep.violations) {
        ordered_json e;
        e["condition"] = viol.condition;
        e["description"] = viol.description;
        e["witness"] = viol.witness;
        v.push_back(std::move(e));
    }
    out["violations"] = v;
    return out;
}

std::string report_text(const ValidationReport& rep) {
    if (rep.ok()) return "ok: all conditions hold\n";
    std::string out;
    for (const auto& v : rep.violations) {
        out += "condition " + std::to_string(v.condition) + ": " + v.description;
        if (!v.witness.empty()) {
            out += " [";
            for (std::size_t i = 0; i < v.witness.size(); ++i) {
                if (i) out += ",";
                out += v.witness[i];
            }
            out += "]";
        }
        out += "\n";
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"workbench for topological dependence logics"};
    app.require_subcommand(1);

    bool json_mode = false;
    app.add_flag("--json", json_mode, "emit machine-readable JSON reports");

    std::string formula_text, model_path, state, lang_text = "lcd", out_path, cert_path;
    std::string betas_text = "0,1/2,1/4,1/8", root_state;
    bool all_states = false, do_verify = false, with_oracle = false;
    int depth = 3;
    std::size_t max_states = 3, count = 20;
    std::uint64_t seed = 1;

    auto* cmd_parse = app.add_subcommand("parse", "parse a formula and print its core form");
    cmd_parse->add_option("formula", formula_text)->required();

    auto* cmd_closure = app.add_subcommand("closure", "compute the filtration closure set");
    cmd_closure->add_option("formula", formula_text)->required();
    cmd_closure->add_option("--lang", lang_text, "lfd|lcd|lud");

    auto* cmd_validate = app.add_subcommand("model-validate", "check the model conditions");
    cmd_validate->add_option("model", model_path)->required();

    bool expand_values = false;
    auto* cmd_expand = app.add_subcommand("model-expand", "expand to a full preorder model");
    cmd_expand->add_option("model", model_path)->required();
    cmd_expand->add_option("--out", out_path, "write the expansion to a file");
    cmd_expand->add_flag("--values", expand_values,
                         "emit the value-space presentation of a standard model instead");

    auto* cmd_check = app.add_subcommand("check", "evaluate a formula over a model");
    cmd_check->add_option("model", model_path)->required();
    cmd_check->add_option("--formula", formula_text)->required();
    cmd_check->add_option("--state", state, "evaluate at one state");
    cmd_check->add_flag("--all", all_states, "print a truth table over all states");

    auto* cmd_sat = app.add_subcommand("sat", "decide satisfiability");
    cmd_sat->add_option("formula", formula_text)->required();
    cmd_sat->add_option("--lang", lang_text, "lfd|lcd|lud");
    cmd_sat->add_option("--certificate", cert_path, "write the satisfying model here");
    cmd_sat->add_flag("--oracle", with_oracle, "cross-check against the bounded search");
    cmd_sat->add_option("--max-states", max_states, "oracle state bound");

    auto* cmd_valid = app.add_subcommand("valid", "decide validity");
    cmd_valid->add_option("formula", formula_text)->required();
    cmd_valid->add_option("--lang", lang_text, "lfd|lcd|lud");
    cmd_valid->add_option("--certificate", cert_path, "write a countermodel here");

    auto* cmd_unravel = app.add_subcommand("unravel", "unravel a model into a history tree");
    cmd_unravel->add_option("model", model_path)->required();
    cmd_unravel->add_option("--root", root_state)->required();
    cmd_unravel->add_option("--depth", depth);
    cmd_unravel->add_option("--betas", betas_text, "comma-separated rational labels");
    cmd_unravel->add_flag("--verify", do_verify, "run the representation battery");
    cmd_unravel->add_option("--out", out_path, "write the tree to a file");

    auto* cmd_proof = app.add_subcommand("proof-verify", "check a derivation file");
    cmd_proof->add_option("proof", model_path)->required();

    auto* cmd_oracle = app.add_subcommand("oracle-compare",
                                          "compare the decision procedure with bounded search");
    cmd_oracle->add_option("formula", formula_text, "single formula (omit for a random corpus)");
    cmd_oracle->add_option("--lang", lang_text, "lfd|lcd|lud");
    cmd_oracle->add_option("--max-states", max_states, "oracle state bound");
    cmd_oracle->add_option("--count", count, "corpus size in random mode");
    cmd_oracle->add_option("--seed", seed, "corpus seed in random mode");

    CLI11_PARSE(app, argc, argv);

    try {
        FormulaStore st;

        if (*cmd_parse) {
            FormulaId f = parse_formula(st, formula_text);
            FormulaId again = parse_formula(st, st.print(f));
            ordered_json j;
            j["formula"] = st.print(f);
            j["language"] = lang_name(st.language(f));
            j["modal_depth"] = st.modal_depth(f);
            j["variables"] = st.vars(f).names();
            j["round_trip"] = again == f;
            emit(j, json_mode,
                 st.print(f) + "\n  language: " + lang_name(st.language(f)) +
                     "\n  modal depth: " + std::to_string(st.modal_depth(f)) + "\n");
            return again == f ? 0 : 2;
        }

        if (*cmd_closure) {
            FormulaId f = parse_formula(st, formula_text);
            ClosureSet cs = closure(st, f, lang_parse(lang_text));
            ordered_json j;
            j["seed"] = st.print(f);
            j["vocabulary"] = cs.vocab.names();
            j["language"] = lang_name(cs.language);
            j["count"] = cs.members.size();
            ordered_json mem = ordered_json::array();
            for (FormulaId m : cs.members) mem.push_back(st.print(m));
            j["members"] = mem;
            std::string text = "members: " + std::to_string(cs.members.size()) + "\n";
            for (FormulaId m : cs.members) text += "  " + st.print(m) + "\n";
            emit(j, json_mode, text);
            return 0;
        }

        if (*cmd_validate) {
            AnyModel m = load_model_file(model_path);
            ValidationReport rep;
            if (auto* sm = std::get_if<StandardModel>(&m)) rep = validate_standard_model(*sm);
            else if (auto* pm = std::get_if<PseudoMetricModel>(&m))
                rep = validate_pseudometric_model(*pm);
            else rep = validate_preorder_model(std::get<PreorderModel>(m));
            emit(report_json(rep), json_mode, report_text(rep));
            return rep.ok() ? 0 : 1;
        }

        if (*cmd_expand) {
            AnyModel m = load_model_file(model_path);
            std::string dumped;
            if (expand_values) {
                auto* sm = std::get_if<StandardModel>(&m);
                if (!sm) throw std::runtime_error("--values needs a standard-preorder model");
                dumped = dump_concrete_json(extract_dependence_model(*sm));
            } else {
                dumped = dump_model_json(to_preorder(m));
            }
            if (!out_path.empty()) write_file(out_path, dumped);
            std::cout << dumped;
            return 0;
        }

        if (*cmd_check) {
            AnyModel m = load_model_file(model_path);
            FormulaId f = parse_formula(st, formula_text);
            ordered_json j;
            j["formula"] = st.print(f);
            std::string text;
            auto eval_state = [&](const std::string& sname) {
                if (st.language(f) == Lang::LUDX) {
                    auto* sm = std::get_if<StandardModel>(&m);
                    if (!sm)
                        throw EvalError("extended atoms are only defined on standard models");
                    StandardEvaluator ev(st, *sm);
                    return ev.eval(sname, f);
                }
                PreorderModel pre = to_preorder(m);
                Evaluator ev(st, pre);
                return ev.eval(sname, f);
            };
            std::vector<std::string> states = std::visit(
                [](const auto& mm) { return mm.states; }, m);
            ordered_json table = ordered_json::object();
            if (all_states || state.empty()) {
                for (const auto& s : states) {
                    bool v = eval_state(s);
                    table[s] = v;
                    text += s + ": " + (v ? "true" : "false") + "\n";
                }
            } else {
                bool v = eval_state(state);
                table[state] = v;
                text += state + ": " + (v ? "true" : "false") + "\n";
            }
            j["truth"] = table;
            emit(j, json_mode, text);
            return 0;
        }

        if (*cmd_sat) {
            FormulaId f = parse_formula(st, formula_text);
            SatResult r = decide_sat(st, f, lang_parse(lang_text));
            ordered_json j;
            j["formula"] = st.print(f);
            j["result"] = r.sat ? "sat" : "unsat";
            j["closure_size"] = r.closure_size;
            j["type_count"] = r.type_count;
            std::string text = std::string(r.sat ? "SAT" : "UNSAT") + "\n";
            if (r.sat) {
                j["satisfied_at"] = r.satisfied_at;
                if (!cert_path.empty()) {
                    ordered_json cj = ordered_json::parse(dump_model_json(*r.certificate));
                    cj["satisfied_at"] = r.satisfied_at;
                    write_file(cert_path, cj.dump(2) + "\n");
                    text += "certificate written to " + cert_path + "\n";
                }
            } else {
                ordered_json tr = ordered_json::array();
                for (const auto& step : r.trace) {
                    ordered_json e;
                    e["round"] = step.round;
                    e["type"] = step.type_name;
                    e["missing_diamond"] = step.missing_diamond;
                    tr.push_back(std::move(e));
                }
                j["elimination_trace"] = tr;
            }
            if (with_oracle) {
                OracleResult o = brute_force_oracle(st, f, max_states, lang_parse(lang_text));
                j["oracle_found"] = o.found;
                bool consistent = !o.found || r.sat;
                j["oracle_consistent"] = consistent;
                text += std::string("oracle: ") + (o.found ? "model found" : "no model up to bound") +
                        (consistent ? "" : " (DISAGREES)") + "\n";
                if (!consistent) {
                    emit(j, json_mode, text);
                    return 2;
                }
            }
            emit(j, json_mode, text);
            return r.sat ? 0 : 1;
        }

        if (*cmd_valid) {
            FormulaId f = parse_formula(st, formula_text);
            ValidityResult r = decide_valid(st, f, lang_parse(lang_text));
            ordered_json j;
            j["formula"] = st.print(f);
            j["result"] = r.valid ? "valid" : "invalid";
            std::string text = std::string(r.valid ? "VALID" : "INVALID") + "\n";
            if (!r.valid) {
                j["falsified_at"] = r.falsified_at;
                if (!cert_path.empty()) {
                    ordered_json cj = ordered_json::parse(dump_model_json(*r.countermodel));
                    cj["falsified_at"] = r.falsified_at;
                    write_file(cert_path, cj.dump(2) + "\n");
                    text += "countermodel written to " + cert_path + "\n";
                }
            }
            emit(j, json_mode, text);
            return r.valid ? 0 : 1;
        }

        if (*cmd_unravel) {
            AnyModel m = load_model_file(model_path);
            PreorderModel pre = to_preorder(m);
            BetaSet betas = parse_betas(betas_text);
            UnravelledTree tree = unravel(pre, root_state, depth, betas);
            if (pre.language == Lang::LUD) pseudo_metrize(tree);
            ordered_json j;
            j["nodes"] = tree.n();
            j["metrized"] = tree.metrized;
            std::string text = "nodes: " + std::to_string(tree.n()) + "\n";
            int rc = 0;
            if (do_verify) {
                VerificationReport rep = verify_representation(tree);
                j["verification"] = ordered_json::parse(dump_report_json(rep));
                text += "verification: " + std::string(rep.ok() ? "clean" : "violations found") +
                        " (" + std::to_string(rep.checks_run) + " checks)\n";
                for (const auto& v : rep.violations)
                    text += "  " + v.claim + " / " + v.item + " @ " + v.witness + "\n";
                rc = rep.ok() ? 0 : 1;
            }
            if (!out_path.empty()) {
                write_file(out_path, dump_tree_json(tree));
                text += "tree written to " + out_path + "\n";
            }
            emit(j, json_mode, text);
            return rc;
        }

        if (*cmd_proof) {
            Derivation d = load_derivation_json(st, read_file(model_path));
            DerivationResult r = check_derivation(st, d);
            ordered_json j;
            j["ok"] = r.ok;
            if (!r.ok) {
                j["error_line"] = r.error_line;
                j["reason"] = r.reason;
            } else if (!d.lines.empty()) {
                j["conclusion"] = st.print(d.lines.back().formula);
            }
            std::string text = r.ok
                ? "ok" + (d.lines.empty() ? std::string()
                                          : ": " + st.print(d.lines.back().formula)) + "\n"
                : "error at line " + std::to_string(r.error_line) + ": " + r.reason + "\n";
            emit(j, json_mode, text);
            return r.ok ? 0 : 1;
        }

        if (*cmd_oracle) {
            auto compare_one = [&](FormulaId f, ordered_json& row) {
                SatResult r = decide_sat(st, f, lang_parse(lang_text));
                OracleResult o = brute_force_oracle(st, f, max_states, lang_parse(lang_text));
                bool consistent = !o.found || r.sat;
                row["formula"] = st.print(f);
                row["decision"] = r.sat ? "sat" : "unsat";
                row["oracle"] = o.found ? "model found" : "no model up to bound";
                row["consistent"] = consistent;
                return consistent;
            };
            ordered_json j;
            ordered_json rows = ordered_json::array();
            bool all_ok = true;
            std::string text;
            if (formula_text.empty() && cmd_oracle->count("--seed") == 0) {
                std::cerr << "error: random corpus mode needs an explicit --seed\n";
                return 2;
            }
            if (!formula_text.empty()) {
                ordered_json row;
                all_ok = compare_one(parse_formula(st, formula_text), row);
                text += row["formula"].get<std::string>() + ": " +
                        row["decision"].get<std::string>() + " / " +
                        row["oracle"].get<std::string>() +
                        (all_ok ? "" : "  (DISAGREES)") + "\n";
                rows.push_back(std::move(row));
            } else {
                Rng rng(seed);
                for (std::size_t i = 0; i < count; ++i) {
                    // Random small formulas over one variable.
                    std::function<FormulaId(int)> gen = [&](int d) -> FormulaId {
                        VarSet x = VarSet::single("x");
                        VarSet sets[2] = {VarSet(), x};
                        switch (rng.below(d > 0 ? 7 : 3)) {
                            case 0: return st.pred("P", {"x"});
                            case 1: return st.dep_atom(sets[rng.below(2)], sets[rng.below(2)]);
                            case 2: return st.cont_atom(sets[rng.below(2)], sets[rng.below(2)]);
                            case 3: return st.mk_not(gen(d - 1));
                            case 4: return st.mk_and(gen(d - 1), gen(d - 1));
                            case 5: return st.dep_mod(sets[rng.below(2)], gen(d - 1));
                            default: return st.know_mod(sets[rng.below(2)], gen(d - 1));
                        }
                    };
                    ordered_json row;
                    bool ok = compare_one(gen(2), row);
                    all_ok = all_ok && ok;
                    text += row["formula"].get<std::string>() + ": " +
                            row["decision"].get<std::string>() + " / " +
                            row["oracle"].get<std::string>() + (ok ? "" : "  (DISAGREES)") + "\n";
                    rows.push_back(std::move(row));
                }
            }
            j["comparisons"] = rows;
            j["consistent"] = all_ok;
            emit(j, json_mode, text);
            return all_ok ? 0 : 1;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
