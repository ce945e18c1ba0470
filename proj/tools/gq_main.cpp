// Command line front end: quantise specs, query holonomies, enumerate
// Bohr-Sommerfeld fibres, run the verification suites, and exercise the
// holonomy division. Exit codes: 0 pass, 1 verification failure, 2 input
// error.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gq/gq.hpp"

namespace {

gq::ModelSpec parse_model_name(const std::string& name) {
    auto split_params = [](const std::string& s) {
        std::vector<int> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
        return out;
    };
    const auto colon = name.find(':');
    const std::string head = name.substr(0, colon);
    const std::string params = colon == std::string::npos ? "" : name.substr(colon + 1);
    if (head == "cylinder") return gq::ModelSpec::cylinder();
    if (head == "disk") return gq::ModelSpec::disk();
    if (head == "focus_focus") return gq::ModelSpec::focus_focus();
    if (head == "linear") return gq::ModelSpec::linear(split_params(params).at(0));
    if (head == "liouville") {
        const auto nk = split_params(params);
        return gq::ModelSpec::liouville(nk.at(0), nk.at(1));
    }
    if (head == "elliptic") {
        const auto nk = split_params(params);
        return gq::ModelSpec::elliptic(nk.at(0), nk.at(1));
    }
    throw gq::invalid_spec_error("unknown model '" + name +
                                 "' (expected cylinder|disk|focus_focus|linear:n|liouville:n,k|elliptic:n,k)");
}

gq::Point parse_point_csv(const std::string& csv) {
    gq::Point p;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) p.push_back(std::stod(item));
    return p;
}

gq::Window parse_window_arg(const std::string& arg) {
    gq::Window w;
    if (arg.empty()) return w;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item == "free" || item == "-") {
            w.comp.push_back(std::nullopt);
            continue;
        }
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw gq::invalid_spec_error("window component '" + item + "' is not lo:hi or free");
        w.comp.push_back(gq::Interval{std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
    }
    return w;
}

std::string complex_json(const gq::Complex& z) {
    return "{\"re\":" + gq::detail::format_real(z.real()) + ",\"im\":" + gq::detail::format_real(z.imag()) +
           "}";
}

void emit(const gq::RunConfig& cfg, const std::string& text) {
    if (cfg.output.empty()) std::cout << text << "\n";
    else gq::write_file(cfg.output, text + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geometric quantisation toolkit: local models, holonomy, homotopy operators, "
                 "Bohr-Sommerfeld fibres, counting theorems"};
    app.require_subcommand(1);

    gq::RunConfig cfg;
    std::string convention = "transport";
    app.add_option("--seed", cfg.seed, "random seed (determines every sample)");
    app.add_option("--samples", cfg.samples, "sample count for randomised checks");
    app.add_option("--tol", cfg.numerics.eq_tol, "assertion tolerance for operator identities");
    app.add_option("--fd-step", cfg.numerics.fd_step, "finite-difference step");
    app.add_option("--quad-steps", cfg.numerics.quadrature_steps, "Simpson intervals per period");
    app.add_option("--ode-tol", cfg.numerics.ode_tol, "transport integrator tolerance");
    app.add_option("--disk-convention", convention, "elliptic holonomy convention: transport|paper");
    app.add_option("--out", cfg.output, "write the primary artifact to this file");

    auto* quantise_cmd = app.add_subcommand("quantise", "dispatch a spec to the counting theorems");
    std::string spec_path;
    quantise_cmd->add_option("spec", spec_path, "JSON spec file")->required();
    bool want_csv = false;
    quantise_cmd->add_flag("--csv", want_csv, "also emit the BS fibre list as CSV");

    auto* holonomy_cmd = app.add_subcommand("holonomy", "holonomy of the orbit through a point");
    std::string model_name, point_csv;
    int generator = 0;
    bool with_oracle = false;
    holonomy_cmd->add_option("--model", model_name, "cylinder|disk|focus_focus|linear:n|liouville:n,k|elliptic:n,k")
        ->required();
    holonomy_cmd->add_option("--point", point_csv, "chart point as CSV")->required();
    holonomy_cmd->add_option("--generator", generator, "generator index (default: the model's circle generator)");
    holonomy_cmd->add_flag("--oracle", with_oracle, "also run the RK4 transport oracle");

    auto* bs_cmd = app.add_subcommand("bs", "enumerate Bohr-Sommerfeld fibres");
    std::string bs_spec_path, window_arg;
    bs_cmd->add_option("--spec", bs_spec_path, "JSON spec file")->required();
    bs_cmd->add_option("--window", window_arg, "override window, e.g. '-2.5:2.5' or 'free;-1.5:2.5'");
    bs_cmd->add_flag("--csv", want_csv, "emit CSV instead of JSON");

    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    std::string suite = "all";
    verify_cmd->add_option("--suite", suite, "operators|holonomy|homotopy|division|bs|focusfocus|all");

    auto* divide_cmd = app.add_subcommand("divide", "holonomy division roundtrip on a chart");
    std::string divide_model = "disk", fn_name = "family0";
    divide_cmd->add_option("--model", divide_model, "disk|focus_focus");
    divide_cmd->add_option("--fn", fn_name, "roundtrip_one|roundtrip_linear|family<k>|obstruction");

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.numerics.validate();
        cfg.disk_convention = convention == "paper" || convention == "paper_printed"
                                  ? gq::DiskConvention::PaperPrinted
                                  : gq::DiskConvention::TransportOracle;
        cfg.csv = want_csv;

        if (*quantise_cmd) {
            const gq::ParsedSpec spec = gq::parse_spec(gq::read_file(spec_path));
            const gq::QuantiseRun run = gq::run_quantise(spec, cfg);
            emit(cfg, run.json);
            if (cfg.csv) {
                if (cfg.output.empty()) std::cout << run.csv;
                else gq::write_file(cfg.output + ".csv", run.csv);
            }
            return 0;
        }

        if (*holonomy_cmd) {
            const auto model = gq::make_model(parse_model_name(model_name));
            gq::Point p = parse_point_csv(point_csv);
            model->check_point(p);
            int g = generator;
            if (g == 0) {
                for (int i = model->rank(); i >= 1; --i)
                    if (model->is_circle_generator(i)) g = i;
                if (g == 0) throw gq::invalid_spec_error("model has no circle generator; pass --generator");
            }
            const gq::OrbitSample orbit{p, model->generator_id(g)};
            const gq::Holonomy h = gq::holonomy_formula(*model, orbit, cfg.disk_convention);
            std::string s = "{\"model\":\"" + model->name() + "\",\"generator\":" + std::to_string(g) +
                            ",\"formula\":" + complex_json(h.value) +
                            ",\"period\":" + gq::detail::format_real(h.period) +
                            ",\"hamiltonian\":" + gq::detail::format_real(h.hamiltonian_value) +
                            ",\"fixed_point\":" + (h.fixed_point ? "true" : "false");
            if (with_oracle) {
                const gq::Holonomy t = gq::holonomy_transport(*model, orbit, cfg.numerics);
                s += ",\"transport\":" + complex_json(t.value) +
                     ",\"formula_vs_transport\":" + gq::detail::format_real(std::abs(h.value - t.value));
            }
            s += "}";
            emit(cfg, s);
            return 0;
        }

        if (*bs_cmd) {
            gq::ParsedSpec spec = gq::parse_spec(gq::read_file(bs_spec_path));
            if (!window_arg.empty()) spec.window = parse_window_arg(window_arg);
            if (spec.descriptor.base != gq::FibrationDescriptor::Base::ModelChart)
                throw gq::invalid_spec_error("bs: spec must describe a chart model; use quantise for polytopes");
            const auto model = gq::make_model(*spec.descriptor.model);
            const auto fibres = gq::enumerate_bs_fibres(*model, spec.window, cfg.disk_convention,
                                                        spec.descriptor.lattice_offset);
            if (cfg.csv) {
                emit(cfg, gq::bs_to_csv(fibres));
            } else {
                gq::QuantisationReport rep;
                rep.bs_fibres = fibres;
                emit(cfg, gq::emit_report(rep, cfg));
            }
            return 0;
        }

        if (*verify_cmd) {
            const gq::VerifyReport rep = gq::run_verify(suite, cfg);
            emit(cfg, gq::emit_verify_report(rep));
            for (const auto& c : rep.cases)
                std::fprintf(stderr, "[%s] %s (residual %.3e, tol %.3e)\n", c.pass ? "PASS" : "FAIL",
                             c.name.c_str(), c.residual, c.tolerance);
            return rep.all_pass ? 0 : 1;
        }

        if (*divide_cmd) {
            const auto model = gq::make_model(parse_model_name(divide_model));
            gq::Rng rng(cfg.seed);
            std::function<gq::Complex(const gq::Point&)> g0;
            bool expect_obstruction = false;
            if (fn_name == "roundtrip_one") {
                g0 = [](const gq::Point&) { return gq::Complex(1.0, 0.0); };
            } else if (fn_name == "roundtrip_linear") {
                g0 = [](const gq::Point& p) { return gq::Complex(p[0], p[1]); };
            } else if (fn_name.rfind("family", 0) == 0) {
                const int k = std::stoi(fn_name.substr(6));
                for (int skip = 0; skip < k; ++skip)
                    gq::sampling::random_trig_coefficient(model, rng, 0.7);
                g0 = gq::sampling::random_trig_coefficient(model, rng, 0.7).value;
            } else if (fn_name == "obstruction") {
                expect_obstruction = true;
            } else {
                throw gq::invalid_spec_error("divide: unknown --fn '" + fn_name + "'");
            }

            const auto chart = gq::detail::division_chart(*model, cfg.disk_convention);
            auto qfac = [&chart](const gq::Point& q) {
                return std::exp(gq::Complex(0.0, -gq::kTwoPi * chart.h(q))) - gq::Complex(1.0, 0.0);
            };
            std::function<gq::Complex(const gq::Point&)> f;
            if (expect_obstruction) f = [](const gq::Point&) { return gq::Complex(1.0, 0.0); };
            else f = [&](const gq::Point& q) { return qfac(q) * g0(q); };

            std::vector<gq::Point> pts;
            gq::Rng prng(cfg.seed + 1);
            for (int s = 0; s < std::max(4, cfg.samples / 10); ++s)
                pts.push_back(gq::sampling::random_chart_point(*model, prng, 2.0, 0.0));
            if (model->spec().kind == gq::ModelKind::Disk) {
                pts.push_back({0.0, 0.0});
                pts.push_back({std::sqrt(2.0), 0.0});
            } else {
                pts.push_back({1.0, 1.0, 0.5, 0.5});
            }

            double max_err = 0.0;
            bool obstructed = false;
            try {
                for (const auto& p : pts) {
                    const gq::Complex g = gq::holonomy_division(*model, f, p, cfg.numerics,
                                                                cfg.disk_convention);
                    if (!expect_obstruction) max_err = std::max(max_err, std::abs(g - g0(p)));
                }
            } catch (const gq::division_obstruction_error& e) {
                obstructed = true;
                if (!expect_obstruction) throw;
                std::fprintf(stderr, "obstruction detected as expected: %s\n", e.what());
            }
            const bool pass = expect_obstruction ? obstructed : max_err <= 1e-5;
            emit(cfg, std::string("{\"fn\":\"") + fn_name +
                          "\",\"max_error\":" + gq::detail::format_real(max_err) +
                          ",\"obstruction\":" + (obstructed ? "true" : "false") +
                          ",\"pass\":" + (pass ? "true" : "false") + "}");
            return pass ? 0 : 1;
        }
    } catch (const gq::parse_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const gq::invalid_spec_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 2;
    } catch (const gq::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
