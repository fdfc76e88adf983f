#include <cstdio>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "hmlc/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"hierarchical multi-label chest X-ray toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "read options from an INI file, one [section] per subcommand");

    hmlc::cli::register_gen(app);
    hmlc::cli::register_preprocess(app);
    hmlc::cli::register_train(app);
    hmlc::cli::register_predict(app);
    hmlc::cli::register_ensemble(app);
    hmlc::cli::register_eval(app);
    hmlc::cli::register_ablate(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const hmlc::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const hmlc::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
