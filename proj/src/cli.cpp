#include "dsp/cli.hpp"

#include "dsp/approx.hpp"
#include "dsp/generate.hpp"
#include "dsp/io.hpp"
#include "dsp/oracle.hpp"
#include "dsp/params.hpp"
#include "dsp/render.hpp"
#include "dsp/restructure.hpp"
#include "dsp/steinberg.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace dsp {

namespace {

namespace fs = std::filesystem;

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << text;
}

Scalar parse_eps(const std::string& text, const char* what) {
    Scalar v;
    try {
        v = parse_scalar(text);
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
    if (v <= 0) throw InputError(std::string(what) + " must be positive");
    return v;
}

InstancePtr load_instance(const std::string& path) {
    return std::make_shared<const Instance>(instance_from_json(read_json_file(path)));
}

Packing load_packing(const std::string& path) {
    return packing_from_json(read_json_file(path), fs::path(path).parent_path());
}

struct Options {
    std::string input, output, report, svg, config, witness;
    std::string epsilon = "1/2", lambda;
    std::string shape = "uniform";
    int n = 6;
    long dmax = 10, hmax = 8;
    std::uint64_t seed = 1;
    RenderSpec render;
    bool noProfile = false;
};

int cmd_gen(const Options& o, std::ostream& out) {
    GenParams g;
    g.n = o.n;
    g.dmax = o.dmax;
    g.hmax = o.hmax;
    g.seed = o.seed;
    g.shape = parse_shape(o.shape);
    Generated r = generate(g);
    write_text(o.output, dump(instance_to_json(*r.instance)), out);
    if (!o.witness.empty()) {
        if (!r.witness) throw InputError("shape " + o.shape + " has no witness packing");
        write_text(o.witness, dump(packing_to_json(*r.witness)), out);
    }
    return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out, bool epsilonGiven) {
    SolverConfig cfg;
    if (!o.config.empty()) cfg = config_from_json(read_json_file(o.config));
    if (epsilonGiven) cfg.eps = parse_eps(o.epsilon, "epsilon");
    if (cfg.eps <= 0 || cfg.eps > 1) throw InputError("epsilon must lie in (0, 1]");
    InstancePtr inst = load_instance(o.input);
    SolveResult r = solve(inst, cfg);
    Json doc{{"report", report_to_json(r.report)}};
    if (o.output.empty())
        doc["packing"] = packing_to_json(r.packing);
    else
        write_text(o.output, dump(packing_to_json(r.packing)), out);
    out << dump(doc);
    if (!o.svg.empty()) write_text(o.svg, render_svg(r.packing, o.render), out);
    return r.report.budgetExceeded ? kExitBudget : kExitOk;
}

int cmd_oracle(const Options& o, std::ostream& out) {
    OracleResult r = exact_opt(load_instance(o.input));
    Json doc{{"opt", scalar_to_json(r.opt)}, {"nodes", r.nodes}, {"packing", packing_to_json(r.packing)}};
    write_text(o.output, dump(doc), out);
    return kExitOk;
}

int cmd_restructure(const Options& o, std::ostream& out) {
    Json in = read_json_file(o.input);
    Packing opt;
    if (looks_like_packing(in)) {
        opt = packing_from_json(in, fs::path(o.input).parent_path());
        Feasibility f = check_feasible(opt);
        if (!opt.complete() || !f.ok) throw InputError("input packing must be complete and feasible");
    } else {
        opt = exact_opt(std::make_shared<const Instance>(instance_from_json(in))).packing;
    }
    std::optional<Scalar> lambda;
    if (!o.lambda.empty()) lambda = parse_eps(o.lambda, "lambda");
    Params params = Params::make(parse_eps(o.epsilon, "epsilon"), lambda);
    params.validate();
    RestructureOutcome r = restructure(opt, params);
    write_text(o.output, dump(outcome_to_json(r)), out);
    if (!o.svg.empty()) write_text(o.svg, render_svg(r.packing, o.render), out);
    return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
    Packing p = load_packing(o.input);
    RatioReport r = verify_ratio(p, parse_eps(o.epsilon, "epsilon"));
    write_text(o.output, dump(ratio_to_json(r)), out);
    return r.pass ? kExitOk : kExitVerify;
}

int cmd_render(const Options& o, std::ostream& out) {
    Packing p = load_packing(o.input);
    RenderSpec spec = o.render;
    spec.showProfile = !o.noProfile;
    std::string target = !o.svg.empty() ? o.svg : o.output;
    write_text(target, render_svg(p, spec), out);
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Demand strip packing toolkit", "dsp"};
    app.require_subcommand(1);
    Options o;

    auto common_io = [&](CLI::App* c, bool needInput) {
        auto* in = c->add_option("--input", o.input, "input JSON file");
        if (needInput) in->required();
        c->add_option("--output", o.output, "output file (stdout when omitted)");
    };
    auto render_opts = [&](CLI::App* c) {
        c->add_option("--svg", o.svg, "write an SVG rendering to this file");
        c->add_option("--width", o.render.widthPx, "SVG width in pixels")->check(CLI::PositiveNumber);
        c->add_option("--height", o.render.heightPx, "SVG height in pixels")->check(CLI::PositiveNumber);
        c->add_option("--color-seed", o.render.colorSeed, "seed for item colours");
        c->add_flag("--annotate", o.render.annotate, "print item ids");
    };

    CLI::App* gen = app.add_subcommand("gen", "generate an instance");
    gen->add_option("--output", o.output, "instance file (stdout when omitted)");
    gen->add_option("--n", o.n, "number of items")->check(CLI::NonNegativeNumber);
    gen->add_option("--dmax", o.dmax, "deadline")->check(CLI::PositiveNumber);
    gen->add_option("--hmax", o.hmax, "largest height")->check(CLI::PositiveNumber);
    gen->add_option("--seed", o.seed, "random seed");
    gen->add_option("--shape", o.shape, "uniform | tall-heavy | two-gap | partition");
    gen->add_option("--witness", o.witness, "also write the optimal packing (two-gap)");

    CLI::App* sol = app.add_subcommand("solve", "approximate an instance");
    common_io(sol, true);
    auto* epsOpt = sol->add_option("--epsilon", o.epsilon, "accuracy, e.g. 1/2");
    sol->add_option("--config", o.config, "solver config JSON");
    render_opts(sol);

    CLI::App* ora = app.add_subcommand("oracle", "exact optimum of a micro-instance");
    common_io(ora, true);

    CLI::App* res = app.add_subcommand("restructure", "restructure an optimal packing");
    common_io(res, true);
    res->add_option("--epsilon", o.epsilon, "accuracy, e.g. 1/2");
    res->add_option("--lambda", o.lambda, "extra item width as a fraction of D");
    render_opts(res);

    CLI::App* ver = app.add_subcommand("verify", "check a packing against the oracle optimum");
    common_io(ver, true);
    ver->add_option("--epsilon", o.epsilon, "accuracy, e.g. 1/2");

    CLI::App* ren = app.add_subcommand("render", "draw a packing as SVG");
    common_io(ren, true);
    render_opts(ren);
    ren->add_flag("--no-profile", o.noProfile, "omit the height profile line");

    std::vector<std::string> argvStore{"dsp"};
    argvStore.insert(argvStore.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (std::string& s : argvStore) argv.push_back(s.data());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (gen->parsed()) return cmd_gen(o, out);
        if (sol->parsed()) return cmd_solve(o, out, epsOpt->count() > 0);
        if (ora->parsed()) return cmd_oracle(o, out);
        if (res->parsed()) return cmd_restructure(o, out);
        if (ver->parsed()) return cmd_verify(o, out);
        if (ren->parsed()) return cmd_render(o, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const OracleRefusal& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const SteinbergPreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kExitVerify;
    }
    return kExitInput;
}

}  // namespace dsp
