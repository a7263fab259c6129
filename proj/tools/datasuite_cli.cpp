#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "datasuite/adult.hpp"
#include "datasuite/commands.hpp"
#include "datasuite/error.hpp"
#include "datasuite/serialization.hpp"

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

// Flags shared by every pipeline subcommand. Only flags given on the command
// line end up in the override document.
struct Flags {
    std::string config;
    std::optional<std::string> train, test, model, label, out, augmentation, representer_fit, vine_order, normalizer_input, preset;
    std::optional<double> alpha, lambda, proper_fraction;
    std::optional<std::size_t> truncation, latent_dim, seeds, top_k, forest_trees;
    std::optional<std::uint64_t> seed;
    std::vector<double> proportions;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "JSON config file; flags override its keys");
        app->add_option("--train", train, "training CSV");
        app->add_option("--test", test, "test CSV");
        app->add_option("--model", model, "model.json written by fit");
        app->add_option("--label", label, "label column (excluded from features)");
        app->add_option("--out", out, "output directory");
        app->add_option("--alpha", alpha, "conformal significance level");
        app->add_option("--lambda", lambda, "inconsistency threshold");
        app->add_option("--proper-fraction", proper_fraction, "share of the augmented set used for fitting");
        app->add_option("--truncation", truncation, "number of vine trees fitted");
        app->add_option("--augmentation", augmentation, "union | synthetic-only | none");
        app->add_option("--representer-fit", representer_fit, "augmented | train");
        app->add_option("--vine-order", vine_order, "input | max-tau");
        app->add_option("--normalizer-input", normalizer_input, "latent | features");
        app->add_option("--latent-dim", latent_dim, "PCA components (0 = half the features)");
        app->add_option("--seed", seed, "random seed (required)");
        app->add_option("--proportions", proportions, "group proportions reported by stratify")->delimiter(',');
        app->add_option("--preset", preset, "synthetic preset, e.g. Da_p50");
        app->add_option("--seeds", seeds, "synth-bench repetitions");
        app->add_option("--top-k", top_k, "size of the certain group in synth-bench");
        app->add_option("--forest-trees", forest_trees, "trees in the downstream classifier");
    }

    json resolve() const {
        json j = config.empty() ? json::object() : datasuite::json::read_file(config);
        if (!j.is_object()) throw datasuite::UsageError("cli", "config must be a JSON object");
        auto set = [&](const char* key, const auto& v) {
            if (v) j[key] = *v;
        };
        set("train", train);
        set("test", test);
        set("model", model);
        set("label", label);
        set("out", out);
        set("augmentation", augmentation);
        set("representer_fit", representer_fit);
        set("vine_order", vine_order);
        set("normalizer_input", normalizer_input);
        set("preset", preset);
        set("alpha", alpha);
        set("lambda", lambda);
        set("proper_fraction", proper_fraction);
        set("truncation", truncation);
        set("latent_dim", latent_dim);
        set("seeds", seeds);
        set("top_k", top_k);
        set("forest_trees", forest_trees);
        set("seed", seed);
        if (!proportions.empty()) j["proportions"] = proportions;
        return j;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conformal feature intervals and instance stratification for tabular data"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, datasuite::Command>> commands{
        {"fit", datasuite::Command::Fit},
        {"intervals", datasuite::Command::Intervals},
        {"stratify", datasuite::Command::Stratify},
        {"metrics", datasuite::Command::Metrics},
        {"synth-bench", datasuite::Command::SynthBench},
        {"lambda-sweep", datasuite::Command::LambdaSweep},
        {"run", datasuite::Command::Run}};
    std::vector<Flags> flags(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t k = 0; k < commands.size(); ++k) {
        auto* sub = app.add_subcommand(commands[k].first);
        flags[k].attach(sub);
        subs.push_back(sub);
    }

    std::string adult_in, adult_out = ".";
    std::uint64_t adult_seed = 0;
    auto* adult = app.add_subcommand("prepare-adult", "encode the census-income CSV and split it in two halves");
    adult->add_option("--input", adult_in, "raw CSV with a header row")->required();
    adult->add_option("--out", adult_out, "output directory");
    adult->add_option("--seed", adult_seed, "split seed")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (adult->parsed()) {
            const auto prepared = datasuite::prepare_adult(datasuite::load_csv(adult_in));
            const auto [train, test] = datasuite::adult_split(prepared, adult_seed);
            datasuite::write_csv(adult_out + "/adult_train.csv", train);
            datasuite::write_csv(adult_out + "/adult_test.csv", test);
            std::cout << "wrote " << train.rows() << " train and " << test.rows() << " test rows\n";
            return kOk;
        }
        for (std::size_t k = 0; k < commands.size(); ++k) {
            if (!subs[k]->parsed()) continue;
            const auto cfg = datasuite::run_config_from_json(flags[k].resolve());
            const auto result = datasuite::run_command(commands[k].second, cfg);
            std::cout << json{{"command", commands[k].first},
                              {"config_hash", datasuite::config_hash(cfg)},
                              {"artifacts", result.artifacts},
                              {"summary", result.summary}}
                             .dump(2)
                      << '\n';
        }
        return kOk;
    } catch (const datasuite::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const datasuite::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const datasuite::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    }
}
