// Command-line front end for certification suites.

#include <krylovlab/harness.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

int report(const krylovlab::Summary& s, const std::filesystem::path& out)
{
    std::cout << "pass " << s.pass << "  warn " << s.warn << "  fail " << s.fail << '\n';
    if (!out.empty())
        std::cout << "reports written to " << out.string() << '\n';
    return s.fail == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"krylovlab: certify Krylov solvability on compact normal truncations"};
    app.require_subcommand(1);

    std::string suite_path;
    std::string out_dir;
    std::string filter;
    int parallelism = 1;

    auto* run = app.add_subcommand("run", "run a suite file");
    run->add_option("--suite", suite_path, "suite JSON file")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--parallelism", parallelism, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--filter", filter, "glob on experiment names");

    std::string demo_out = "krylovlab-demo";
    auto* demo = app.add_subcommand("demo", "run the built-in demonstration suite");
    demo->add_option("--out", demo_out, "output directory");
    demo->add_option("--parallelism", parallelism, "worker threads")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "parse and validate a suite file");
    validate->add_option("--suite", suite_path, "suite JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto specs = krylovlab::load_suite(suite_path);
            if (!filter.empty())
                specs = krylovlab::filter_suite(std::move(specs), filter);
            return report(krylovlab::run_suite(specs, parallelism, out_dir), out_dir);
        }
        if (*demo) {
            const auto specs = krylovlab::parse_suite(krylovlab::demo_suite_json());
            return report(krylovlab::run_suite(specs, parallelism, demo_out), demo_out);
        }
        if (*validate) {
            const auto specs = krylovlab::load_suite(suite_path);
            int jobs = 0;
            for (const auto& s : specs)
                jobs += s.repetitions;
            std::cout << "ok: " << specs.size() << " experiments, " << jobs << " runs\n";
            return 0;
        }
    } catch (const krylovlab::Error& ex) {
        std::cerr << ex.what() << '\n';
        return 2;
    }
    return 0;
}
