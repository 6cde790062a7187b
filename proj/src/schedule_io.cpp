#include "icelab/schedule_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "icelab/error.hpp"

namespace icelab {

namespace {

using json = nlohmann::ordered_json;

json to_document(const Schedule& schedule) {
    json alphabet;
    alphabet["symbols"] = schedule.alphabet.symbols();
    if (auto sp = schedule.alphabet.spacer_label())
        alphabet["spacer_symbol"] = *sp;
    else
        alphabet["spacer_symbol"] = nullptr;

    json doc;
    doc["alphabet"] = std::move(alphabet);
    std::vector<int> seed(schedule.seed_word.symbols.begin(), schedule.seed_word.symbols.end());
    doc["seed_word"] = seed;
    json stages = json::array();
    for (const Stage& st : schedule.stages) {
        json s;
        s["q"] = st.q;
        s["rotations"] = st.rotations;
        s["spacers"] = st.spacers;
        stages.push_back(std::move(s));
    }
    doc["stages"] = std::move(stages);
    doc["family_tag"] = schedule.family_tag;
    if (schedule.rng_seed)
        doc["rng_seed"] = *schedule.rng_seed;
    else
        doc["rng_seed"] = nullptr;
    return doc;
}

}  // namespace

std::string schedule_to_json(const Schedule& schedule) {
    return to_document(schedule).dump(2) + "\n";
}

Schedule schedule_from_json(const std::string& text) {
    Schedule sch;
    try {
        const json doc = json::parse(text);
        const json& a = doc.at("alphabet");
        std::optional<std::string> spacer;
        if (a.contains("spacer_symbol") && !a["spacer_symbol"].is_null())
            spacer = a["spacer_symbol"].get<std::string>();
        sch.alphabet = Alphabet(a.at("symbols").get<std::vector<std::string>>(), spacer);
        for (int s : doc.at("seed_word").get<std::vector<int>>()) {
            if (s < 0 || static_cast<std::size_t>(s) >= sch.alphabet.size())
                fail(ErrorKind::Config, "seed_word index outside alphabet");
            sch.seed_word.symbols.push_back(static_cast<Symbol>(s));
        }
        for (const json& s : doc.at("stages")) {
            Stage st;
            st.q = s.at("q").get<Index>();
            st.rotations = s.at("rotations").get<std::vector<Index>>();
            st.spacers = s.contains("spacers") ? s["spacers"].get<std::vector<Index>>()
                                               : std::vector<Index>(st.rotations.size(), 0);
            sch.stages.push_back(std::move(st));
        }
        if (doc.contains("family_tag")) sch.family_tag = doc["family_tag"].get<std::string>();
        if (doc.contains("rng_seed") && !doc["rng_seed"].is_null())
            sch.rng_seed = doc["rng_seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("schedule JSON: ") + e.what());
    }
    validate(sch);
    return sch;
}

Schedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot read schedule file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return schedule_from_json(buf.str());
}

void save_schedule(const Schedule& schedule, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Config, "cannot write " + path);
    out << schedule_to_json(schedule);
}

std::string schedule_hash(const Schedule& schedule) { return fnv1a_hex(to_document(schedule).dump()); }

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

Schedule cat_schedule() {
    const Alphabet abc = Alphabet::from_chars("CAT");
    Schedule sch{abc, parse_word(abc, "CAT"), {}, "cat", std::nullopt};
    sch.stages.push_back(pure_stage({0, 1, 2, 2, 0, 1}));
    sch.stages.push_back(pure_stage({7, 4, 11}));
    return sch;
}

}  // namespace icelab
