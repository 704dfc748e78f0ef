#include "qmetric/errors.hpp"
#include "qmetric/io.hpp"
#include "qmetric/propinquity.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using qmetric::AfChain;
using qmetric::BaireSeq;
using qmetric::ChainPtr;
using qmetric::FiniteMetricSpace;
using qmetric::SpacePtr;
using Json = nlohmann::ordered_json;

// shortest round-trip decimal, shared by stdout, CSV, and --out
std::string fmt(double v) { return nlohmann::json(v).dump(); }

std::uint64_t effective_seed(std::uint64_t cli_seed) {
    const char* env = std::getenv("PROPINQ_SEED");
    if (env == nullptr || *env == '\0') return cli_seed;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
        throw qmetric::DomainError(std::string("PROPINQ_SEED is not an integer: ") + env);
    return static_cast<std::uint64_t>(v);
}

ChainPtr load_chain(const std::string& path) {
    return std::make_shared<const AfChain>(qmetric::parse_chain(path));
}

SpacePtr load_space(const std::string& path) {
    return std::make_shared<const FiniteMetricSpace>(qmetric::parse_space(path));
}

BaireSeq parse_seq_arg(const std::string& arg) {
    std::vector<int> entries;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            const int v = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            entries.push_back(v);
        } catch (const std::exception&) {
            throw qmetric::ParseError("sequence entry '" + tok + "' is not an integer");
        }
    }
    if (entries.empty()) throw qmetric::ParseError("empty sequence argument '" + arg + "'");
    return qmetric::make_baire_seq(std::move(entries));
}

std::string seq_to_string(const BaireSeq& s) {
    std::string out;
    for (size_t i = 0; i < s.entries.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s.entries[i]);
    }
    return out;
}

struct Sink {
    std::string csv_path;
    std::string out_path;
    std::string csv;
    Json doc = Json::object();

    void csv_line(const std::string& line) { csv += line + "\n"; }
    void flush() const {
        if (!csv_path.empty()) qmetric::write_text_file(csv_path, csv);
        if (!out_path.empty()) qmetric::write_text_file(out_path, doc.dump(2) + "\n");
    }
};

void run_check(const std::vector<std::string>& files, const std::string& space_path,
               const std::string& chain_path, Sink& sink) {
    SpacePtr space;
    ChainPtr chain;
    if (!space_path.empty()) space = load_space(space_path);
    if (!chain_path.empty()) chain = load_chain(chain_path);
    Json checked = Json::array();
    for (const std::string& path : files) {
        const std::string text = qmetric::read_text_file(path);
        Json probe;
        try {
            probe = Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw qmetric::ParseError(path + ": " + e.what());
        }
        std::string kind;
        if (probe.is_object() && probe.contains("blocks")) {
            kind = "chain";
            AfChain parsed(qmetric::parse_chain_text(text, path));
            (void)parsed;
        } else if (probe.is_object() && probe.contains("labels")) {
            kind = "space";
            qmetric::parse_space_text(text, path);
        } else if (probe.is_object() && probe.contains("values")) {
            kind = "element";
            if (!space || !chain)
                throw qmetric::ParseError(path +
                                          ": element files need --space and --chain context");
            qmetric::parse_element_text(text, path, space, chain);
        } else if (probe.is_object() && probe.contains("densities")) {
            kind = "state";
            if (!space || !chain)
                throw qmetric::ParseError(path + ": state files need --space and --chain context");
            qmetric::parse_state_text(text, path, space, chain);
        } else {
            throw qmetric::ParseError(path + ": unrecognized document, expected one of the keys "
                                             "blocks/labels/values/densities");
        }
        std::cout << "OK " << path << " (" << kind << ")\n";
        checked.push_back(Json{{"path", path}, {"kind", kind}});
    }
    sink.doc["checked"] = std::move(checked);
}

void run_lip(const std::string& chain_path, const std::string& space_path,
             const std::string& element_path, Sink& sink) {
    const ChainPtr chain = load_chain(chain_path);
    const SpacePtr space = load_space(space_path);
    const qmetric::CxaElement f = qmetric::parse_element(element_path, space, chain);
    const double slope = qmetric::slope_seminorm(f);
    const double beta = qmetric::beta_seminorm(f);
    const double total = qmetric::total_lip(f);
    std::cout << "slope " << fmt(slope) << "\n"
              << "beta " << fmt(beta) << "\n"
              << "total " << fmt(total) << "\n";
    sink.csv_line("slope,beta,total");
    sink.csv_line(fmt(slope) + "," + fmt(beta) + "," + fmt(total));
    sink.doc = Json{{"slope", slope}, {"beta", beta}, {"total", total}};
}

void run_mk(const std::string& chain_path, const std::string& space_path,
            const std::string& a_path, const std::string& b_path, double tol, int max_cuts,
            const std::string& witness_path, Sink& sink) {
    const ChainPtr chain = load_chain(chain_path);
    const SpacePtr space = load_space(space_path);
    const qmetric::CxaState phi = qmetric::parse_state(a_path, space, chain);
    const qmetric::CxaState psi = qmetric::parse_state(b_path, space, chain);
    qmetric::MkOptions opt;
    opt.tol = tol;
    opt.max_cuts = max_cuts;
    const qmetric::MkResult r = qmetric::mk_distance(phi, psi, opt);
    std::cout << "value " << fmt(r.value) << "\n"
              << "upper " << fmt(r.upper_bound) << "\n"
              << "cuts " << r.cuts_used << "\n";
    sink.csv_line("value,cuts_used,tol");
    sink.csv_line(fmt(r.value) + "," + std::to_string(r.cuts_used) + "," + fmt(tol));
    sink.doc = Json{{"value", r.value},
                    {"upper_bound", r.upper_bound},
                    {"cuts_used", r.cuts_used},
                    {"tol", tol}};
    if (!witness_path.empty())
        qmetric::write_text_file(witness_path, qmetric::serialize_element(r.witness));
}

void run_diam(const std::string& chain_path, const std::string& space_path, int samples,
              std::uint64_t seed, double tol, Sink& sink) {
    const ChainPtr chain = load_chain(chain_path);
    const SpacePtr space = load_space(space_path);
    const qmetric::DiameterProbeResult r =
        qmetric::diameter_probe(space, chain, samples, effective_seed(seed), tol);
    sink.csv_line("sample_idx,mk_value,bound");
    Json rows = Json::array();
    for (const qmetric::DiameterProbeRow& row : r.rows) {
        std::cout << "sample " << row.sample_idx << " mk " << fmt(row.mk_value) << "\n";
        sink.csv_line(std::to_string(row.sample_idx) + "," + fmt(row.mk_value) + "," +
                      fmt(r.bound));
        rows.push_back(Json{{"sample_idx", row.sample_idx}, {"mk_value", row.mk_value}});
    }
    std::cout << "max_observed " << fmt(r.max_observed) << "\n"
              << "bound " << fmt(r.bound) << "\n";
    sink.doc = Json{{"max_observed", r.max_observed}, {"bound", r.bound}, {"rows", rows}};
}

void run_bound(const std::string& chain_path, const std::string& space_path,
               const std::string& other_space_path, Sink& sink) {
    const ChainPtr chain = load_chain(chain_path);
    const SpacePtr space = load_space(space_path);
    sink.csv_line("n,beta_n");
    Json levels = Json::array();
    for (int n = 0; n <= chain->top_level(); ++n) {
        const qmetric::LevelBound b = qmetric::chain_level_bound(*space, *chain, n);
        std::cout << "n " << n << " bound " << fmt(b.bound) << " height " << fmt(b.height)
                  << "\n";
        sink.csv_line(std::to_string(n) + "," + fmt(b.bound));
        levels.push_back(Json{{"n", n}, {"bound", b.bound}, {"height", b.height}});
    }
    sink.doc["levels"] = std::move(levels);
    if (!other_space_path.empty()) {
        const SpacePtr other = load_space(other_space_path);
        const qmetric::FdApproxBounds fd = qmetric::fd_approx_bounds(*space, *other, *chain);
        std::cout << "space_gap " << fmt(fd.space_gap) << "\n"
                  << "to_commutative " << fmt(fd.to_commutative) << "\n"
                  << "between_tensors " << fmt(fd.between_tensors) << "\n";
        sink.doc["fd_approx"] = Json{{"space_gap", fd.space_gap},
                                     {"to_commutative", fd.to_commutative},
                                     {"between_tensors", fd.between_tensors}};
    }
}

void run_uhf(const std::string& seq_a, const std::string& seq_b, int depth,
             const std::string& space_path, int samples, std::uint64_t seed, bool check,
             Sink& sink) {
    const BaireSeq a = parse_seq_arg(seq_a);
    if (seq_b.empty()) {
        const int d = depth >= 0 ? depth : qmetric::uhf_feasible_depth(a);
        const qmetric::UhfTruncation t = qmetric::uhf_build(a, d);
        sink.csv_line("n,dim,beta_n");
        Json levels = Json::array();
        for (size_t n = 0; n < t.dims.size(); ++n) {
            const double beta = t.chain->beta_at(static_cast<int>(n));
            std::cout << "n " << n << " dim " << t.dims[n] << " beta " << fmt(beta) << "\n";
            sink.csv_line(std::to_string(n) + "," + std::to_string(t.dims[n]) + "," + fmt(beta));
            levels.push_back(Json{{"n", n}, {"dim", t.dims[n]}, {"beta", beta}});
        }
        sink.doc = Json{{"seq", seq_to_string(a)}, {"depth", d}, {"levels", levels}};
        return;
    }
    const BaireSeq b = parse_seq_arg(seq_b);
    SpacePtr space;
    if (!space_path.empty())
        space = load_space(space_path);
    else
        space = std::make_shared<const FiniteMetricSpace>(
            qmetric::make_space({"pt"}, {{0.0}}));
    int agree = 0;
    while (agree < std::min(a.length(), b.length()) &&
           a.entries[static_cast<size_t>(agree)] == b.entries[static_cast<size_t>(agree)])
        ++agree;
    const double baire = qmetric::baire_distance(a, b);
    const double bound = qmetric::uhf_propinquity_bound(a, b, *space);
    std::cout << "prefix_agree " << agree << "\n"
              << "baire " << fmt(baire) << "\n"
              << "bound " << fmt(bound) << "\n";
    sink.csv_line("prefix_agree,baire,bound");
    sink.csv_line(std::to_string(agree) + "," + fmt(baire) + "," + fmt(bound));
    sink.doc = Json{{"seq_a", seq_to_string(a)},
                    {"seq_b", seq_to_string(b)},
                    {"prefix_agree", agree},
                    {"baire", baire},
                    {"bound", bound}};
    if (check) {
        const double disc =
            qmetric::uhf_isometry_check(a, b, space, agree, samples, effective_seed(seed));
        std::cout << "isometry_discrepancy " << fmt(disc) << "\n";
        sink.doc["isometry_discrepancy"] = disc;
    }
}

void run_gh(const std::string& a_path, const std::string& b_path, Sink& sink) {
    const SpacePtr a = load_space(a_path);
    const SpacePtr b = load_space(b_path);
    const double gh = qmetric::gh_bruteforce(*a, *b);
    std::cout << "gh " << fmt(gh) << "\n";
    sink.csv_line("gh");
    sink.csv_line(fmt(gh));
    sink.doc = Json{{"gh", gh}};
}

void run_net(const std::string& space_path, double eps, Sink& sink) {
    const SpacePtr space = load_space(space_path);
    const std::vector<int> net = qmetric::greedy_net(*space, eps);
    const double h = qmetric::hausdorff_subset(*space, net);
    sink.csv_line("index,label");
    Json idx = Json::array();
    for (int i : net) {
        std::cout << "point " << i << " " << space->labels[static_cast<size_t>(i)] << "\n";
        sink.csv_line(std::to_string(i) + "," + space->labels[static_cast<size_t>(i)]);
        idx.push_back(i);
    }
    std::cout << "hausdorff " << fmt(h) << "\n";
    sink.doc = Json{{"eps", eps}, {"net", idx}, {"hausdorff", h}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum metric toolkit: Lip seminorms, state distances, and approximation "
                 "bounds for matrix-valued functions on finite metric spaces"};
    app.require_subcommand(1);

    std::vector<std::string> check_files;
    std::string opt_space, opt_chain;
    CLI::App* c_check = app.add_subcommand("check", "validate input files");
    c_check->add_option("files", check_files, "files to validate")->required()->expected(-1);
    c_check->add_option("--space", opt_space, "space file for element/state context");
    c_check->add_option("--chain", opt_chain, "chain file for element/state context");

    std::string lip_chain, lip_space, lip_element;
    CLI::App* c_lip = app.add_subcommand("lip", "seminorms of an element");
    c_lip->add_option("chain", lip_chain, "chain file")->required();
    c_lip->add_option("space", lip_space, "space file")->required();
    c_lip->add_option("element", lip_element, "element file")->required();

    std::string mk_chain, mk_space, mk_a, mk_b, mk_witness;
    double mk_tol = 1e-6;
    int mk_max_cuts = 10000;
    CLI::App* c_mk = app.add_subcommand("mk", "distance between two states");
    c_mk->add_option("chain", mk_chain, "chain file")->required();
    c_mk->add_option("space", mk_space, "space file")->required();
    c_mk->add_option("stateA", mk_a, "first state file")->required();
    c_mk->add_option("stateB", mk_b, "second state file")->required();
    c_mk->add_option("--tol", mk_tol, "certified gap tolerance");
    c_mk->add_option("--max-cuts", mk_max_cuts, "cut budget");
    c_mk->add_option("--witness", mk_witness, "write the witness element here");

    std::string diam_chain, diam_space;
    int diam_samples = 10;
    std::uint64_t diam_seed = 20240901;
    double diam_tol = 1e-7;
    CLI::App* c_diam = app.add_subcommand("diam", "random-state distances vs the diameter bound");
    c_diam->add_option("chain", diam_chain, "chain file")->required();
    c_diam->add_option("space", diam_space, "space file")->required();
    c_diam->add_option("--samples", diam_samples, "number of state pairs");
    c_diam->add_option("--seed", diam_seed, "sampling seed");
    c_diam->add_option("--tol", diam_tol, "distance tolerance");

    std::string bound_chain, bound_space, bound_other;
    CLI::App* c_bound = app.add_subcommand("bound", "level bounds and approximation bounds");
    c_bound->add_option("chain", bound_chain, "chain file")->required();
    c_bound->add_option("space", bound_space, "space file")->required();
    c_bound->add_option("other", bound_other, "second space for the approximation bounds");

    std::string uhf_a, uhf_b, uhf_space;
    int uhf_depth = -1;
    int uhf_samples = 50;
    std::uint64_t uhf_seed = 20240901;
    bool uhf_check = false;
    CLI::App* c_uhf = app.add_subcommand("uhf", "sequence-driven matrix chains");
    c_uhf->add_option("seqA", uhf_a, "comma-separated positive integers")->required();
    c_uhf->add_option("seqB", uhf_b, "second sequence to compare against");
    c_uhf->add_option("--depth", uhf_depth, "truncation depth for the build report");
    c_uhf->add_option("--space", uhf_space, "base space file");
    c_uhf->add_option("--samples", uhf_samples, "samples for --check");
    c_uhf->add_option("--seed", uhf_seed, "sampling seed");
    c_uhf->add_flag("--check", uhf_check, "also run the seminorm identification check");

    std::string gh_a, gh_b;
    CLI::App* c_gh = app.add_subcommand("gh", "brute-force distance between two spaces");
    c_gh->add_option("spaceA", gh_a, "first space file")->required();
    c_gh->add_option("spaceB", gh_b, "second space file")->required();

    std::string net_space;
    double net_eps = 0.0;
    CLI::App* c_net = app.add_subcommand("net", "greedy eps-net of a space");
    c_net->add_option("space", net_space, "space file")->required();
    c_net->add_option("eps", net_eps, "net resolution")->required();

    Sink sink;
    for (CLI::App* sub : {c_check, c_lip, c_mk, c_diam, c_bound, c_uhf, c_gh, c_net}) {
        sub->add_option("--csv", sink.csv_path, "write CSV output here");
        sub->add_option("--out", sink.out_path, "write a JSON result document here");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "E_USAGE: " << e.what() << "\n";
        std::cerr << app.help();
        return 64;
    }

    try {
        if (app.got_subcommand(c_check)) run_check(check_files, opt_space, opt_chain, sink);
        else if (app.got_subcommand(c_lip)) run_lip(lip_chain, lip_space, lip_element, sink);
        else if (app.got_subcommand(c_mk))
            run_mk(mk_chain, mk_space, mk_a, mk_b, mk_tol, mk_max_cuts, mk_witness, sink);
        else if (app.got_subcommand(c_diam))
            run_diam(diam_chain, diam_space, diam_samples, diam_seed, diam_tol, sink);
        else if (app.got_subcommand(c_bound)) run_bound(bound_chain, bound_space, bound_other, sink);
        else if (app.got_subcommand(c_uhf))
            run_uhf(uhf_a, uhf_b, uhf_depth, uhf_space, uhf_samples, uhf_seed, uhf_check, sink);
        else if (app.got_subcommand(c_gh)) run_gh(gh_a, gh_b, sink);
        else if (app.got_subcommand(c_net)) run_net(net_space, net_eps, sink);
        sink.flush();
    } catch (const qmetric::ConvergenceError& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return 2;
    } catch (const qmetric::Error& e) {
        std::cerr << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "E_INTERNAL: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
