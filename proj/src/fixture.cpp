#include "cxnprobe/fixture.hpp"

#include <array>
#include <cstdio>
#include <map>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/hash.hpp"
#include "cxnprobe/io.hpp"
#include "cxnprobe/rng.hpp"
#include "cxnprobe/text.hpp"

namespace cxnprobe::fixture {

namespace {

struct Noun {
    const char* sg;
    const char* pl;
};

// Singular/plural pairs; a few invariant accented nouns exercise the
// Unicode paths.
constexpr std::array<Noun, 143> kNouns{{
    {"casa", "case"},       {"porta", "porte"},     {"strato", "strati"},
    {"pietra", "pietre"},   {"mattone", "mattoni"}, {"gomito", "gomiti"},
    {"spalla", "spalle"},   {"passo", "passi"},     {"giorno", "giorni"},
    {"notte", "notti"},     {"onda", "onde"},       {"goccia", "gocce"},
    {"foglia", "foglie"},   {"ramo", "rami"},       {"filo", "fili"},
    {"sasso", "sassi"},     {"muro", "muri"},       {"tetto", "tetti"},
    {"libro", "libri"},     {"pagina", "pagine"},   {"parola", "parole"},
    {"riga", "righe"},      {"voce", "voci"},       {"mano", "mani"},
    {"viso", "visi"},       {"fronte", "fronti"},   {"petto", "petti"},
    {"fianco", "fianchi"},  {"banco", "banchi"},    {"tavolo", "tavoli"},
    {"sedia", "sedie"},     {"strada", "strade"},   {"piazza", "piazze"},
    {"ponte", "ponti"},     {"torre", "torri"},     {"finestra", "finestre"},
    {"balcone", "balconi"}, {"uscio", "usci"},      {"scala", "scale"},
    {"gradino", "gradini"}, {"campo", "campi"},     {"vigna", "vigne"},
    {"albero", "alberi"},   {"fiore", "fiori"},     {"frutto", "frutti"},
    {"seme", "semi"},       {"chicco", "chicchi"},  {"grano", "grani"},
    {"mazzo", "mazzi"},     {"cesto", "cesti"},     {"sacco", "sacchi"},
    {"cassa", "casse"},     {"scatola", "scatole"}, {"pacco", "pacchi"},
    {"treno", "treni"},     {"vagone", "vagoni"},   {"carro", "carri"},
    {"ruota", "ruote"},     {"motore", "motori"},   {"porto", "porti"},
    {"nave", "navi"},       {"vela", "vele"},       {"remo", "remi"},
    {"faro", "fari"},       {"isola", "isole"},     {"costa", "coste"},
    {"monte", "monti"},     {"valle", "valli"},     {"bosco", "boschi"},
    {"prato", "prati"},     {"fiume", "fiumi"},     {"lago", "laghi"},
    {"anno", "anni"},       {"mese", "mesi"},       {"ora", "ore"},
    {"minuto", "minuti"},   {"secondo", "secondi"}, {"colpo", "colpi"},
    {"salto", "salti"},     {"turno", "turni"},     {"tiro", "tiri"},
    {"punto", "punti"},     {"gesto", "gesti"},     {"sguardo", "sguardi"},
    {"respiro", "respiri"}, {"sorso", "sorsi"},     {"boccone", "bocconi"},
    {"morso", "morsi"},     {"tocco", "tocchi"},    {"squillo", "squilli"},
    {"lampo", "lampi"},     {"tuono", "tuoni"},     {"scossa", "scosse"},
    {"ondata", "ondate"},   {"raffica", "raffiche"},{"folata", "folate"},
    {"spinta", "spinte"},   {"stretta", "strette"}, {"piega", "pieghe"},
    {"maglia", "maglie"},   {"nodo", "nodi"},       {"anello", "anelli"},
    {"catena", "catene"},   {"corda", "corde"},     {"fune", "funi"},
    {"trave", "travi"},     {"asse", "assi"},       {"tavola", "tavole"},
    {"lastra", "lastre"},   {"piastra", "piastre"}, {"tegola", "tegole"},
    {"città", "città"},     {"caffè", "caffè"},     {"virtù", "virtù"},
    {"mattina", "mattine"}, {"sera", "sere"},       {"stagione", "stagioni"},
    {"strofa", "strofe"},   {"verso", "versi"},     {"canto", "canti"},
    {"suono", "suoni"},     {"gong", "gong"},       {"squadra", "squadre"},
    {"fila", "file"},       {"colonna", "colonne"}, {"cerchio", "cerchi"},
    {"quadro", "quadri"},   {"telo", "teli"},       {"velo", "veli"},
    {"foglio", "fogli"},    {"nastro", "nastri"},   {"palo", "pali"},
    {"chiodo", "chiodi"},   {"vite", "viti"},       {"bullone", "bulloni"},
    {"cavo", "cavi"},       {"tubo", "tubi"},       {"binario", "binari"},
    {"sentiero", "sentieri"},{"solco", "solchi"},   {"argine", "argini"},
    {"terrazzo", "terrazzi"},{"cortile", "cortili"},
}};

constexpr std::array<const char*, 12> kNumbers{
    "zero", "uno", "due", "tre", "quattro", "cinque",
    "sei", "sette", "otto", "nove", "dieci", "dodici",
};

constexpr std::array<const char*, 12> kCities{
    "Arezzo", "Verona", "Bologna", "Milano", "Torino", "Parma",
    "Siena",  "Pisa",   "Lucca",   "Trento", "Padova", "Ferrara",
};

constexpr std::array<const char*, 8> kFillers{
    "ogni mattina",  "senza fretta",   "per tutta la giornata",
    "lungo il viale", "fino a sera",   "con grande pazienza",
    "sotto la pioggia", "davanti a tutti",
};

struct Template {
    const char* prefix;  // may be empty
    const char* suffix;
};

struct Builder {
    const FixtureParams& params;
    std::vector<ConstructionInstance> out;
    std::size_t noun_cursor = 0;
    int counter = 0;
    SeededRng rng;

    explicit Builder(const FixtureParams& p)
        : params(p), rng(SeededRng::derive(p.seed, "fixture")) {}

    std::vector<Noun> take_nouns(int lemmas) {
        std::vector<Noun> slice;
        for (int i = 0; i < lemmas; ++i) {
            if (noun_cursor >= kNouns.size()) {
                throw Error("fixture: noun inventory exhausted; reduce category sizes");
            }
            slice.push_back(kNouns[noun_cursor++]);
        }
        return slice;
    }

    std::string next_id() {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "fx-%05d", counter++);
        return buf;
    }

    void emit(const std::string& prefix, const std::string& span,
              const std::string& suffix, const std::string& prep,
              const std::string& lemma, const std::string& form, Number number,
              InstanceClass cls, SemanticLabel sem, DistractorType dtype) {
        ConstructionInstance inst;
        inst.id = next_id();
        std::string sentence;
        std::size_t span_start = 0;
        if (!prefix.empty()) {
            sentence = prefix + " ";
            span_start = text::codepoint_count(prefix) + 1;
        }
        sentence += span;
        const std::size_t span_end = span_start + text::codepoint_count(span);
        if (!suffix.empty()) sentence += " " + suffix;
        inst.sentence = std::move(sentence);
        inst.span_start = span_start;
        inst.span_end = span_end;
        inst.prep = prep;
        inst.noun_lemma = lemma;
        inst.noun_form = form;
        inst.number = number;
        inst.cls = cls;
        inst.semantic_label = sem;
        inst.distractor_type = dtype;
        inst.language = "it";
        out.push_back(std::move(inst));
    }

    // N P N constructions over a noun slice, rotating templates and fillers.
    void cxn_block(int count, const std::vector<Noun>& nouns, const std::string& prep,
                   bool plural, SemanticLabel sem,
                   const std::vector<Template>& templates) {
        for (int i = 0; i < count; ++i) {
            const Noun& noun = nouns[static_cast<std::size_t>(i) % nouns.size()];
            const std::string form = plural ? noun.pl : noun.sg;
            const Template& tpl =
                templates[static_cast<std::size_t>(i / static_cast<int>(nouns.size())) %
                          templates.size()];
            std::string suffix = tpl.suffix;
            suffix += " ";
            suffix += kFillers[rng.bounded(kFillers.size())];
            suffix += ".";
            emit(tpl.prefix, form + " " + prep + " " + form, suffix, prep, noun.sg,
                 form, plural ? Number::Plural : Number::Singular, InstanceClass::Cxn,
                 sem, DistractorType::None);
        }
    }
};

}  // namespace

FixtureParams full_fixture_params() { return FixtureParams{}; }

FixtureParams smoke_fixture_params() {
    FixtureParams p;
    p.seed = 101;
    p.juxtaposition_a = 30;
    p.succession_a = 20;
    p.succession_su = 20;
    p.accumulation_su = 30;
    p.succession_per = 10;
    p.succession_dopo = 10;
    p.connection_a = 2;
    p.idiosyncratic_a = 2;
    p.pnpn_a = 10;
    p.verbal_a = 10;
    p.num_p_num_a = 10;
    p.n_extended_a = 10;
    p.n_extended_su = 10;
    p.proper_name_su = 10;
    p.n_su_n_giu_su = 10;
    p.num_p_num_su = 10;
    p.thematic_su = 10;
    p.short_sentences = 2;
    p.cross_prep_overlap = 1;
    return p;
}

std::vector<ConstructionInstance> make_fixture_corpus(const FixtureParams& params) {
    Builder b(params);
    const int per = params.per_lemma;
    auto lemmas_for = [per](int count) { return (count + per - 1) / per; };

    // --- constructions -----------------------------------------------------
    auto juxt_nouns = b.take_nouns(lemmas_for(params.juxtaposition_a));
    b.cxn_block(params.juxtaposition_a, juxt_nouns, "a", false,
                SemanticLabel::JuxtapositionContact,
                {{"I due lavoravano", "con i colleghi della ditta"},
                 {"Le case sorgevano", "lungo il pendio della collina"},
                 {"Restarono seduti", "per tutto il tempo della prova"},
                 {"Gli scaffali correvano", "fino in fondo al magazzino"}});

    auto succ_a_nouns = b.take_nouns(lemmas_for(params.succession_a));
    b.cxn_block(params.succession_a, succ_a_nouns, "a", false,
                SemanticLabel::SuccessionIterationDistributivity,
                {{"La squadra avanzava", "verso la cima della montagna"},
                 {"Il lavoro procedeva", "senza mai una vera pausa"},
                 {"Controllavano la rete", "con una cura quasi ossessiva"}});

    auto succ_su_nouns = b.take_nouns(lemmas_for(params.succession_su));
    b.cxn_block(params.succession_su, succ_su_nouns, "su", false,
                SemanticLabel::SuccessionIterationDistributivity,
                {{"Il cantiere cresceva", "in mezzo al quartiere nuovo"},
                 {"La pratica passava", "da un ufficio a quello accanto"},
                 {"Ripetevano la scena", "davanti al regista esausto"}});

    auto accum_nouns = b.take_nouns(lemmas_for(params.accumulation_su));
    b.cxn_block(params.accumulation_su, accum_nouns, "su", true,
                SemanticLabel::GreaterPluralityAccumulation,
                {{"Si accumulavano", "davanti al cancello della fabbrica"},
                 {"Arrivavano", "da ogni parte della provincia"},
                 {"In archivio giacevano", "in attesa di una firma"}});

    // per/dopo pools share a few lemmas with the a/su succession pools to
    // exercise disjointness across the preposition boundary.
    auto per_nouns = b.take_nouns(lemmas_for(params.succession_per));
    auto dopo_nouns = b.take_nouns(lemmas_for(params.succession_dopo));
    for (int i = 0; i < params.cross_prep_overlap; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        if (k < per_nouns.size() && k < succ_a_nouns.size()) {
            per_nouns[k] = succ_a_nouns[k];
        }
        if (k < dopo_nouns.size() && k < succ_su_nouns.size()) {
            dopo_nouns[k] = succ_su_nouns[k];
        }
    }
    b.cxn_block(params.succession_per, per_nouns, "per", false,
                SemanticLabel::SuccessionIterationDistributivity,
                {{"Setacciarono il paese", "senza trovare alcuna traccia"},
                 {"Rividero il testo", "prima della consegna finale"}});
    b.cxn_block(params.succession_dopo, dopo_nouns, "dopo", false,
                SemanticLabel::SuccessionIterationDistributivity,
                {{"La fila scorreva", "sotto il sole del mezzogiorno"},
                 {"Il registro si riempiva", "con una regolarità sorprendente"}});

    auto conn_nouns = b.take_nouns(lemmas_for(params.connection_a));
    b.cxn_block(params.connection_a, conn_nouns, "a", false,
                SemanticLabel::ConnectionTransition,
                {{"Il discorso passava", "senza soluzione di continuità"}});
    auto idio_nouns = b.take_nouns(lemmas_for(params.idiosyncratic_a));
    b.cxn_block(params.idiosyncratic_a, idio_nouns, "a", false,
                SemanticLabel::Idiosyncratic,
                {{"Se ne stavano", "come si usava una volta"}});

    // --- distractors --------------------------------------------------------
    // Distractor lemmas reuse construction nouns from the start of the list,
    // creating natural cross-class lexical overlap.
    auto reuse = [&](std::size_t offset, int count) {
        std::vector<Noun> slice;
        for (int i = 0; i < count; ++i) {
            slice.push_back(kNouns[(offset + static_cast<std::size_t>(i)) % kNouns.size()]);
        }
        return slice;
    };

    const Noun dummy{"", ""};
    auto emit_distractor_block = [&](int count, const std::vector<Noun>& nouns,
                                     DistractorType type) {
        for (int i = 0; i < count; ++i) {
            const Noun& noun =
                nouns.empty() ? dummy
                              : nouns[static_cast<std::size_t>(i) % nouns.size()];
            const std::string filler = kFillers[b.rng.bounded(kFillers.size())];
            switch (type) {
                case DistractorType::Pnpn:
                    b.emit("Tutto avvenne in pochi mesi con un passaggio",
                           std::string("da ") + noun.sg + " ad " + noun.sg,
                           "quasi automatico " + filler + ".", "a", noun.sg, noun.sg,
                           Number::Singular, InstanceClass::Distractor,
                           SemanticLabel::None, type);
                    break;
                case DistractorType::Verbal:
                    b.emit("Quel gesto improvviso aggiunse",
                           std::string(noun.sg) + " a " + noun.sg,
                           "senza alcun rimedio " + filler + ".", "a", noun.sg,
                           noun.sg, Number::Singular, InstanceClass::Distractor,
                           SemanticLabel::None, type);
                    break;
                case DistractorType::NumPNumA: {
                    const char* num = kNumbers[static_cast<std::size_t>(i) % kNumbers.size()];
                    b.emit("Il risultato non si sbloccava e restava sullo",
                           std::string(num) + " a " + num,
                           "fino al fischio finale " + filler + ".", "a", num, num,
                           Number::Singular, InstanceClass::Distractor,
                           SemanticLabel::None, type);
                    break;
                }
                case DistractorType::NExtended:
                    b.emit("Le due telecamere alternavano",
                           std::string("primi ") + noun.pl + " a " + noun.pl,
                           "interi da angolazioni diverse " + filler + ".", "a",
                           noun.sg, noun.pl, Number::Plural,
                           InstanceClass::Distractor, SemanticLabel::None, type);
                    break;
                case DistractorType::ProperName: {
                    const char* city = kCities[static_cast<std::size_t>(i) % kCities.size()];
                    b.emit("La posizione del Comune di",
                           std::string(city) + " su " + city,
                           "Fiere è sembrata chiarissima " + filler + ".", "su", city,
                           city, Number::Singular, InstanceClass::Distractor,
                           SemanticLabel::None, type);
                    break;
                }
                case DistractorType::NSuNGiu:
                    b.emit("Una voce dall'alto ripeteva",
                           std::string(noun.pl) + " su " + noun.pl + " giù",
                           "per tutta la sala " + filler + ".", "su", noun.sg,
                           noun.pl, Number::Plural, InstanceClass::Distractor,
                           SemanticLabel::None, type);
                    break;
                case DistractorType::NumPNumSu: {
                    const char* num = kNumbers[static_cast<std::size_t>(i) % kNumbers.size()];
                    b.emit("Per nostra fortuna furono promossi",
                           std::string(num) + " su " + num,
                           "al primo vero tentativo " + filler + ".", "su", num, num,
                           Number::Singular, InstanceClass::Distractor,
                           SemanticLabel::None, type);
                    break;
                }
                case DistractorType::ThematicTarget:
                    b.emit("Per la rivista del circolo scrivevano saggi di",
                           std::string(noun.pl) + " su " + noun.pl,
                           "con dedizione rara " + filler + ".", "su", noun.sg,
                           noun.pl, Number::Plural, InstanceClass::Distractor,
                           SemanticLabel::None, type);
                    break;
                default:
                    throw Error("fixture: unexpected distractor type");
            }
        }
    };

    auto lemmas_for_d = [per](int count) { return (count + per - 1) / per; };
    emit_distractor_block(params.pnpn_a, reuse(3, lemmas_for_d(params.pnpn_a)),
                          DistractorType::Pnpn);
    emit_distractor_block(params.verbal_a, reuse(21, lemmas_for_d(params.verbal_a)),
                          DistractorType::Verbal);
    emit_distractor_block(params.num_p_num_a, {}, DistractorType::NumPNumA);
    emit_distractor_block(params.n_extended_a,
                          reuse(40, lemmas_for_d(params.n_extended_a)),
                          DistractorType::NExtended);
    // N-extended occurs with both preps; the su share reuses other nouns.
    {
        auto nouns = reuse(55, lemmas_for_d(params.n_extended_su));
        for (int i = 0; i < params.n_extended_su; ++i) {
            const Noun& noun = nouns[static_cast<std::size_t>(i) % nouns.size()];
            const std::string filler = kFillers[b.rng.bounded(kFillers.size())];
            b.emit("La commissione rimborsava spese generali di",
                   std::string(noun.sg) + " su " + noun.sg,
                   "forfetaria per i piccoli progetti " + filler + ".", "su", noun.sg,
                   noun.sg, Number::Singular, InstanceClass::Distractor,
                   SemanticLabel::None, DistractorType::NExtended);
        }
    }
    emit_distractor_block(params.proper_name_su, {}, DistractorType::ProperName);
    emit_distractor_block(params.n_su_n_giu_su,
                          reuse(70, lemmas_for_d(params.n_su_n_giu_su)),
                          DistractorType::NSuNGiu);
    emit_distractor_block(params.num_p_num_su, {}, DistractorType::NumPNumSu);
    emit_distractor_block(params.thematic_su,
                          reuse(85, lemmas_for_d(params.thematic_su)),
                          DistractorType::ThematicTarget);

    // Sentences below the length threshold; the filter must drop them.
    for (int i = 0; i < params.short_sentences; ++i) {
        const Noun& noun = kNouns[static_cast<std::size_t>(i)];
        b.emit("Procedevano", std::string(noun.sg) + " a " + noun.sg, "",
               "a", noun.sg, noun.sg, Number::Singular, InstanceClass::Cxn,
               SemanticLabel::SuccessionIterationDistributivity, DistractorType::None);
    }

    return std::move(b.out);
}

std::vector<AnnotationRecord> make_fixture_annotations(
    const std::vector<ConstructionInstance>& corpus, int n_instances,
    int n_annotators, std::uint64_t seed, double disagreement) {
    const std::string succ = to_string(SemanticLabel::SuccessionIterationDistributivity);
    const std::string accum = to_string(SemanticLabel::GreaterPluralityAccumulation);
    const std::string juxt = to_string(SemanticLabel::JuxtapositionContact);

    SeededRng rng(SeededRng::derive(seed, "annotations"));
    std::vector<AnnotationRecord> records;
    int taken = 0;
    for (const auto& inst : corpus) {
        if (taken >= n_instances) break;
        if (inst.cls != InstanceClass::Cxn ||
            inst.semantic_label == SemanticLabel::None) {
            continue;
        }
        ++taken;
        const std::string truth = to_string(inst.semantic_label);
        for (int a = 0; a < n_annotators; ++a) {
            std::string label = truth;
            if (rng.uniform01() < disagreement) {
                // confusions concentrate on the two adjacent labels
                if (truth == succ) label = accum;
                else if (truth == accum) label = succ;
                else label = succ;
            }
            records.push_back({inst.id, "ann-" + std::to_string(a + 1), label});
        }
    }
    return records;
}

void write_fixture_vectors(const std::filesystem::path& path,
                           const std::vector<ConstructionInstance>& corpus,
                           int dim, std::uint64_t seed) {
    std::map<std::string, bool> words;  // word -> plural?
    for (const auto& inst : corpus) {
        words.emplace(inst.noun_lemma, false);
        words.emplace(inst.noun_form, inst.number == Number::Plural);
    }
    std::vector<double> plural_dir(static_cast<std::size_t>(dim));
    {
        SeededRng rng(SeededRng::derive(seed, "plural_dir"));
        for (auto& v : plural_dir) v = rng.gaussian();
    }
    std::string out = std::to_string(words.size()) + " " + std::to_string(dim) + "\n";
    char buf[32];
    for (const auto& [word, plural] : words) {
        out += word;
        SeededRng rng(SeededRng::derive(seed, "word", {fnv1a64(word)}));
        for (int c = 0; c < dim; ++c) {
            double v = rng.gaussian();
            if (plural) v += 2.0 * plural_dir[static_cast<std::size_t>(c)];
            std::snprintf(buf, sizeof(buf), " %.6f", v);
            out += buf;
        }
        out += "\n";
    }
    io::write_file(path, out);
}

SplitConfiguration smoke_split_config() {
    SplitConfiguration c;
    c.name = "SMOKE";
    c.label_kind = LabelKind::InstanceClassLabel;
    for (const std::string prep : {"a", "su"}) {
        c.quotas[{Partition::Train, kClsCxn, prep}] = 20;
        c.quotas[{Partition::Train, kClsDistractor, prep}] = 20;
        c.quotas[{Partition::Test, kClsCxn, prep}] = 5;
        c.quotas[{Partition::Test, kClsDistractor, prep}] = 5;
    }
    c.decremental_sizes = {80, 40};
    c.n_splits = 5;
    c.seed = 13;
    return c;
}

}  // namespace cxnprobe::fixture
