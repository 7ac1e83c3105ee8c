#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>

#include "crex/attack.hpp"
#include "crex/coercion.hpp"
#include "crex/errors.hpp"
#include "crex/report.hpp"

namespace crex::cli {

namespace {

namespace fs = std::filesystem;

// Relative output paths land in $CREX_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
    if (path.empty())
        return path;
    const char* dir = std::getenv("CREX_OUT_DIR");
    if (!dir || *dir == '\0' || fs::path(path).is_absolute())
        return path;
    return (fs::path(dir) / path).string();
}

void write_report(const Report& rep, const std::string& out_path) {
    if (out_path.empty())
        return;
    std::string path = resolve_out(out_path);
    rep.save(path);
    std::cout << "report written to " << path << "\n";
}

Bytes u8(bool v) {
    return Bytes{static_cast<std::uint8_t>(v ? 1 : 0)};
}

std::vector<KeyPair> demo_keys(const GroupParams& gp, RandomSource& rng, std::size_t n) {
    std::vector<KeyPair> keys;
    std::set<mpz_class> seen;
    while (keys.size() < n) {
        KeyPair k = keygen(gp, rng);
        if (seen.insert(k.pk.value()).second)
            keys.push_back(k);
    }
    return keys;
}

std::vector<MixServer> demo_servers(const GroupParams& gp, RandomSource& rng, std::size_t count,
                                    std::size_t batch) {
    std::vector<MixServer> servers;
    for (std::size_t k = 0; k < count; ++k)
        servers.push_back(make_server(k, batch, gp, rng));
    return servers;
}

MixInput plain_batch(const std::vector<GroupElement>& keys) {
    MixInput in;
    in.session_id = to_bytes("cli-mix");
    for (const GroupElement& pk : keys)
        in.entries.push_back({pk, std::nullopt});
    return in;
}

int cmd_exam_run(const std::string& config_path, std::uint64_t seed, bool seed_set,
                 const std::string& group_override, const std::string& out) {
    RunConfig cfg;
    if (!config_path.empty())
        cfg = RunConfig::load_file(config_path);
    if (seed_set)
        cfg.seed = seed;
    if (!group_override.empty())
        cfg.group_id = group_override;
    cfg.validate();

    ExamResult res = run_exam(cfg);
    std::string path = resolve_out(out.empty() ? "exam.transcript" : out);
    res.transcript.save(path);

    std::size_t failures = 0;
    for (const CheckResult& c : res.verdicts)
        if (!c.pass) {
            ++failures;
            std::cout << "FAIL " << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
        }
    std::cout << "phase reached: " << phase_name(res.reached) << "\n"
              << res.verdicts.size() - failures << "/" << res.verdicts.size()
              << " checks passed\n"
              << "transcript written to " << path << "\n";

    Report rep;
    Record r("report.exam.run");
    r.add_str(cfg.group_id)
        .add_u64(cfg.seed)
        .add_u32(cfg.candidates)
        .add_u32(cfg.examiners)
        .add_u32(cfg.questions)
        .add_u32(cfg.partitions)
        .add_str(phase_name(res.reached))
        .add_u32(static_cast<std::uint32_t>(res.verdicts.size()))
        .add_u32(static_cast<std::uint32_t>(failures))
        .add(sha256(res.transcript.serialize()));
    rep.records.push_back(std::move(r));
    rep.save(path + ".report");
    return res.all_passed ? 0 : 1;
}

int cmd_exam_verify(const std::string& transcript_path, const std::string& out) {
    ExamTranscript t = ExamTranscript::load(transcript_path);
    std::vector<CheckResult> checks = verify_transcript(t);
    std::size_t failures = 0;
    for (const CheckResult& c : checks) {
        std::cout << (c.pass ? "pass " : "FAIL ") << c.name
                  << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
        if (!c.pass)
            ++failures;
    }
    std::cout << checks.size() - failures << "/" << checks.size() << " checks passed\n";

    Report rep;
    Record r("report.exam.verify");
    r.add_u32(static_cast<std::uint32_t>(checks.size()))
        .add_u32(static_cast<std::uint32_t>(failures));
    rep.records.push_back(std::move(r));
    for (const CheckResult& c : checks) {
        Record cr("report.check");
        cr.add_str(c.name).add(u8(c.pass)).add_str(c.detail);
        rep.records.push_back(std::move(cr));
    }
    write_report(rep, out);
    return failures == 0 ? 0 : 1;
}

int cmd_attack_demo(std::uint64_t seed, std::uint32_t n, std::uint32_t servers,
                    const std::string& group, bool external, const std::string& out) {
    GroupParams gp = GroupParams::preset(group);
    RandomSource rng(seed);
    RandomSource keyrng = rng.fork("keys");
    std::vector<KeyPair> keys = demo_keys(gp, keyrng, n);
    std::vector<GroupElement> L;
    for (const KeyPair& k : keys)
        L.push_back(k.pk);
    std::size_t target = rng.fork("choice").u64_below(n);

    RandomSource adv = rng.fork("adversary");
    RandomSource mixrng = rng.fork("mix");
    std::uint64_t ops = 0, sessions = 0;
    for (;;) {
        InjectionPlan plan =
            external ? forge_injection(gp, std::vector<GroupElement>{L[target]}, 0, adv, &ops)
                     : forge_injection(gp, L, target, adv, &ops);
        plan.target_index = target;
        std::vector<GroupElement> batch = L;
        batch.push_back(plan.injected);
        std::vector<MixServer> chain = demo_servers(gp, mixrng, servers, batch.size());
        MixOutput mixed = run_chain(chain, plain_batch(batch), gp);
        ++sessions;
        std::size_t located;
        try {
            located = locate_target(gp, mixed.pseudonyms, mixed.h, plan, &ops);
        } catch (const Ambiguous&) {
            if (sessions > 64)
                throw Error("attack did not converge");
            continue;  // fresh s, fresh session
        }
        // ground truth held by the harness, not the adversary
        Scalar r_bar = composite_exponent(reveal_exponents(chain), gp);
        bool verified = mixed.pseudonyms[located] == L[target].pow(r_bar, gp);
        std::cout << "target " << target << " deanonymized to output slot " << located << " in "
                  << sessions << " session(s), " << ops << " group ops; "
                  << (verified ? "verified against server secrets" : "VERIFICATION FAILED")
                  << "\n";
        Report rep;
        Record r("report.attack.demo");
        r.add_str(group)
            .add_u64(seed)
            .add_u32(n)
            .add_u32(servers)
            .add_u32(static_cast<std::uint32_t>(target))
            .add(u8(external))
            .add(u8(true))
            .add(u8(verified))
            .add_u64(sessions)
            .add_u64(ops)
            .add_u32(static_cast<std::uint32_t>(located));
        rep.records.push_back(std::move(r));
        write_report(rep, out);
        return verified ? 0 : 1;
    }
}

int cmd_attack_linkage(std::uint64_t seed, std::uint32_t n, std::uint32_t servers,
                       const std::string& group, const std::string& mode_name,
                       const std::string& out) {
    GroupParams gp = GroupParams::preset(group);
    LinkageMode mode;
    if (mode_name == "single")
        mode = LinkageMode::SingleSession;
    else if (mode_name == "per-target")
        mode = LinkageMode::PerTarget;
    else
        throw ConfigError("mode must be single or per-target");

    RandomSource rng(seed);
    RandomSource keyrng = rng.fork("keys");
    std::vector<KeyPair> keys = demo_keys(gp, keyrng, n);
    std::vector<GroupElement> L;
    for (const KeyPair& k : keys)
        L.push_back(k.pk);

    RandomSource mixrng = rng.fork("mix");
    std::vector<Scalar> session_rbars;
    std::vector<MixOutput> session_outputs;
    MixOracle oracle = [&](const std::vector<GroupElement>& batch) {
        std::vector<MixServer> chain = demo_servers(gp, mixrng, servers, batch.size());
        session_rbars.push_back(composite_exponent(reveal_exponents(chain), gp));
        MixOutput mixed = run_chain(chain, plain_batch(batch), gp);
        session_outputs.push_back(mixed);
        return mixed;
    };

    RandomSource adv = rng.fork("adversary");
    LinkageResult res = full_linkage(gp, L, oracle, adv, mode);

    // a claimed link is correct when some session's output holds L[i]^r at
    // the claimed slot (single-session mode: the final session)
    bool correct = true;
    for (std::size_t i = 0; i < L.size(); ++i) {
        bool ok = false;
        for (std::size_t k = 0; k < session_outputs.size(); ++k) {
            const MixOutput& o = session_outputs[k];
            if (res.links[i] < o.pseudonyms.size() &&
                o.pseudonyms[res.links[i]] == L[i].pow(session_rbars[k], gp))
                ok = true;
        }
        correct = correct && ok;
    }
    if (mode == LinkageMode::SingleSession) {
        const MixOutput& last = session_outputs.back();
        const Scalar& rb = session_rbars.back();
        for (std::size_t i = 0; i < L.size(); ++i)
            correct = correct && last.pseudonyms[res.links[i]] == L[i].pow(rb, gp);
    }

    std::cout << n << " links in " << res.sessions << " session(s), " << res.group_ops
              << " group ops (" << mode_name << " mode); "
              << (correct ? "all links verified" : "LINK VERIFICATION FAILED") << "\n";

    Report rep;
    Record r("report.attack.linkage");
    r.add_str(group)
        .add_u64(seed)
        .add_u32(n)
        .add_str(mode_name)
        .add_u64(res.sessions)
        .add_u64(res.group_ops)
        .add(u8(correct));
    rep.records.push_back(std::move(r));
    write_report(rep, out);
    return correct ? 0 : 1;
}

int cmd_attack_iremix(std::uint64_t seed, std::uint32_t n, const std::string& group,
                      const std::string& out) {
    GroupParams gp = GroupParams::preset(group);
    RandomSource rng(seed);
    RandomSource keyrng = rng.fork("keys");
    std::vector<KeyPair> keys = demo_keys(gp, keyrng, n);

    MixInput honest;
    honest.session_id = to_bytes("cli-iremix");
    RandomSource provers = rng.fork("proofs");
    for (const KeyPair& k : keys)
        honest.entries.push_back(
            {k.pk, dlog_prove(gp, k.sk, generator(gp), honest.session_id, provers)});

    RandomSource adv = rng.fork("adversary");
    std::size_t target = rng.fork("choice").u64_below(n);
    IremixAttackOutcome outcome = attack_iremix(gp, honest, target, adv);
    std::cout << (outcome.blocked ? "Blocked: " : "NOT BLOCKED: ") << outcome.detail << "\n";

    Report rep;
    Record r("report.attack.iremix");
    r.add_str(group).add_u64(seed).add_u32(n).add(u8(outcome.blocked)).add_str(outcome.detail);
    rep.records.push_back(std::move(r));
    write_report(rep, out);
    return outcome.blocked ? 0 : 1;
}

int cmd_mixnet_demo(std::uint64_t seed, std::uint32_t n, std::uint32_t servers,
                    const std::string& group, bool iremix, const std::string& out) {
    GroupParams gp = GroupParams::preset(group);
    RandomSource rng(seed);
    RandomSource keyrng = rng.fork("keys");
    std::vector<KeyPair> keys = demo_keys(gp, keyrng, n);

    MixInput in;
    in.session_id = to_bytes("cli-mixnet-demo");
    RandomSource provers = rng.fork("proofs");
    for (const KeyPair& k : keys) {
        std::optional<DlogProof> proof;
        if (iremix)
            proof = dlog_prove(gp, k.sk, generator(gp), in.session_id, provers);
        in.entries.push_back({k.pk, proof});
    }

    RandomSource mixrng = rng.fork("mix");
    std::vector<MixServer> chain = demo_servers(gp, mixrng, servers, n);
    MixOutput mixed = iremix ? run_iremix(chain, in, gp) : run_chain(chain, in, gp);

    std::cout << "input keys and the published pseudonym column:\n";
    for (std::size_t i = 0; i < n && i < 24; ++i)
        std::cout << "  " << hex_encode(keys[i].pk.encode(gp)) << "   "
                  << hex_encode(mixed.pseudonyms[i].encode(gp)) << "\n";
    std::cout << "  generator row: g -> " << hex_encode(mixed.h.encode(gp)) << " (h after "
              << servers << " server(s))\n";

    std::uint32_t located = 0;
    for (const KeyPair& k : keys)
        if (try_find_own_pseudonym(gp, k.sk, mixed))
            ++located;
    std::cout << located << "/" << n << " owners located their pseudonym\n";

    Report rep;
    Record r("report.mixnet.demo");
    r.add_str(group).add_u64(seed).add_u32(n).add_u32(servers).add(u8(iremix)).add_u32(located);
    rep.records.push_back(std::move(r));
    write_report(rep, out);
    return located == n ? 0 : 1;
}

void print_check_vector(const char* label, const CheckVector& v) {
    std::cout << label << ":";
    for (const CheckResult& c : v.checks)
        std::cout << " " << c.name << "=" << (c.pass ? "ok" : "FAIL");
    std::cout << "\n";
}

int cmd_coerce_candidate(const std::string& transcript_path, std::uint32_t candidate,
                         std::uint64_t seed, const std::string& out) {
    ExamTranscript t = ExamTranscript::load(transcript_path);
    RandomSource rng(seed);
    bool leak = !PublicView::from_transcript(t).leaks.empty();
    GameReport game = leak ? play_candidate_game_against_leak(t, candidate, rng)
                           : play_candidate_game(t, candidate, rng);
    print_check_vector("real", game.real);
    print_check_vector("fake", game.fake);
    std::cout << "fabricated evidence " << (game.fake_consistent ? "passes" : "FAILS")
              << " the coercer's checks; real and fake are "
              << (game.indistinguishable ? "indistinguishable" : "DISTINGUISHABLE") << "\n";

    Report rep;
    Record r("report.coerce.candidate");
    r.add_u32(candidate)
        .add(u8(game.real.consistent()))
        .add(u8(game.fake_consistent))
        .add(u8(game.indistinguishable))
        .add_u32(static_cast<std::uint32_t>(game.fake.checks.size()));
    rep.records.push_back(std::move(r));
    for (const CheckResult& c : game.fake.checks) {
        Record cr("report.check");
        cr.add_str(c.name).add(u8(c.pass)).add_str(c.detail);
        rep.records.push_back(std::move(cr));
    }
    write_report(rep, out);
    return 0;
}

int cmd_coerce_examiner(const std::string& transcript_path, std::uint32_t examiner,
                        const std::string& decoy, const std::string& out) {
    ExamTranscript t = ExamTranscript::load(transcript_path);
    GameReport game = play_examiner_game(t, examiner, decoy);
    print_check_vector("real", game.real);
    print_check_vector("fake", game.fake);
    std::cout << "decoy-label evidence " << (game.fake_consistent ? "passes" : "FAILS")
              << " the coercer's checks; real and fake are "
              << (game.indistinguishable ? "indistinguishable" : "DISTINGUISHABLE") << "\n";

    Report rep;
    Record r("report.coerce.examiner");
    r.add_u32(examiner)
        .add_str(decoy)
        .add(u8(game.real.consistent()))
        .add(u8(game.fake_consistent))
        .add(u8(game.indistinguishable))
        .add_u32(static_cast<std::uint32_t>(game.fake.checks.size()));
    rep.records.push_back(std::move(r));
    write_report(rep, out);
    return 0;
}

}  // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"coercion-resistant e-exam protocol simulator"};
    app.require_subcommand(1);

    std::string config_path, exam_group, group = "test16", out, transcript;
    std::string mode = "single", decoy;
    std::uint64_t seed = 1;
    std::uint32_t n = 10, servers = 2, candidate = 0, examiner = 0;
    bool external = false, iremix = false;

    auto* exam = app.add_subcommand("exam", "run or verify exam simulations");
    exam->require_subcommand(1);
    auto* exam_run = exam->add_subcommand("run", "run the five phases and write a transcript");
    exam_run->add_option("--config", config_path, "config file (key = value lines)");
    auto* seed_opt = exam_run->add_option("--seed", seed, "seed override");
    exam_run->add_option("--group", exam_group, "group preset override (test16|modp2048)");
    exam_run->add_option("--out", out, "transcript output path");

    auto* exam_verify = exam->add_subcommand("verify", "replay all checks over a transcript");
    exam_verify->add_option("--transcript", transcript, "transcript path")->required();
    exam_verify->add_option("--out", out, "report output path");

    auto* attack = app.add_subcommand("attack", "injection attacks on the mixnet");
    attack->require_subcommand(1);
    auto* demo = attack->add_subcommand("demo", "targeted deanonymization of one key");
    demo->add_option("--seed", seed);
    demo->add_option("--n", n, "batch size");
    demo->add_option("--servers", servers);
    demo->add_option("--group", group);
    demo->add_flag("--external", external, "adversary knows only the target element");
    demo->add_option("--out", out);

    auto* linkage = attack->add_subcommand("full-linkage", "link every key to its pseudonym");
    linkage->add_option("--seed", seed);
    linkage->add_option("--n", n);
    linkage->add_option("--servers", servers);
    linkage->add_option("--group", group);
    linkage->add_option("--mode", mode, "single | per-target");
    linkage->add_option("--out", out);

    auto* irx = attack->add_subcommand("iremix", "the same injection against the hardened gate");
    irx->add_option("--seed", seed);
    irx->add_option("--n", n);
    irx->add_option("--group", group);
    irx->add_option("--out", out);

    auto* coerce = app.add_subcommand("coerce", "coercion games over a stored transcript");
    coerce->require_subcommand(1);
    auto* cc = coerce->add_subcommand("candidate", "candidate reveals key + claimed test");
    cc->add_option("--transcript", transcript)->required();
    cc->add_option("--candidate", candidate);
    cc->add_option("--seed", seed);
    cc->add_option("--out", out);

    auto* ce = coerce->add_subcommand("examiner", "examiner claims a decoy label");
    ce->add_option("--transcript", transcript)->required();
    ce->add_option("--examiner", examiner);
    ce->add_option("--decoy", decoy, "claimed label, e.g. P2")->required();
    ce->add_option("--out", out);

    auto* mixnet = app.add_subcommand("mixnet", "standalone mixnet runs");
    mixnet->require_subcommand(1);
    auto* mdemo = mixnet->add_subcommand("demo", "mix a batch and print the columns");
    mdemo->add_option("--seed", seed);
    mdemo->add_option("--n", n);
    mdemo->add_option("--servers", servers);
    mdemo->add_option("--group", group);
    mdemo->add_flag("--iremix", iremix, "require and check key proofs");
    mdemo->add_option("--out", out);

    std::vector<const char*> argv;
    argv.push_back("crex");
    for (const std::string& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (exam_run->parsed())
            return cmd_exam_run(config_path, seed, seed_opt->count() > 0, exam_group, out);
        if (exam_verify->parsed())
            return cmd_exam_verify(transcript, out);
        if (demo->parsed())
            return cmd_attack_demo(seed, n, servers, group, external, out);
        if (linkage->parsed())
            return cmd_attack_linkage(seed, n, servers, group, mode, out);
        if (irx->parsed())
            return cmd_attack_iremix(seed, n, group, out);
        if (cc->parsed())
            return cmd_coerce_candidate(transcript, candidate, seed, out);
        if (ce->parsed())
            return cmd_coerce_examiner(transcript, examiner, decoy, out);
        if (mdemo->parsed())
            return cmd_mixnet_demo(seed, n, servers, group, iremix, out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace crex::cli
