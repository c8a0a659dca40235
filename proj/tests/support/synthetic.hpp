#pragma once

// Synthetic data for tests: a Spanish-like frequency lexicon and study cohorts.
// Everything is a pure function of the seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errata/study_stats.hpp"

namespace synthetic {

inline const std::vector<std::string>& common_spanish_words() {
  static const std::vector<std::string> words = {
      "de", "la", "que", "el", "en", "y", "a", "los", "se", "del", "las", "un", "por", "con", "no", "una",
      "su", "para", "es", "al", "lo", "como", "más", "pero", "sus", "le", "ya", "o", "fue", "este", "ha",
      "sí", "porque", "esta", "son", "entre", "cuando", "muy", "sin", "sobre", "ser", "también", "me",
      "hasta", "hay", "donde", "han", "quien", "desde", "todo", "nos", "durante", "todos", "uno", "les",
      "ni", "contra", "otros", "fueron", "ese", "eso", "había", "ante", "ellos", "e", "esto", "mí", "antes",
      "algunos", "qué", "unos", "yo", "otro", "otras", "otra", "él", "tanto", "esa", "estos", "mucho",
      "quienes", "nada", "muchos", "cual", "sea", "poco", "ella", "estar", "haber", "estas", "estaba",
      "estamos", "algunas", "algo", "nosotros", "casa", "vaca", "ahora", "hacer", "llave", "perro",
      "carro", "cabeza", "zapato", "cielo", "gente", "girasol", "guitarra", "queso", "bueno", "escribir",
      "escuela", "pájaro", "árbol", "mamá", "veces", "repente", "embargo", "encima", "además", "prisa",
      "corriendo", "viviendo", "saltando", "pensamiento", "peligroso", "cariñoso", "movimiento", "llorar",
      "calle", "bosque", "voy", "iba", "hermano", "caballo", "gato", "pato", "tiempo", "verde", "burro",
      "mesa", "plato", "globo", "bruja", "crema", "dijiste", "nuevo", "jugué", "agua", "niño", "niña",
      "padre", "madre", "día", "noche", "sol", "luna", "mar", "río", "libro", "mano", "ojo", "boca",
      "pelo", "perra", "gallina", "caballero", "lluvia", "zorro", "jirafa", "general", "ventana", "puerta",
      "silla", "cama", "cosa", "camino", "amigo", "amiga", "grande", "pequeño", "bonito", "feliz", "rojo",
      "azul", "blanco", "negro", "comer", "beber", "vivir", "jugar", "correr", "saltar", "cantar", "bailar",
      "leer", "querer", "poder", "decir", "venir", "volver", "llegar", "llamar", "llevar", "hablar",
      "trabajo", "pueblo", "ciudad", "mundo", "vida", "juego", "fiesta", "regalo", "clase", "maestro",
      "maestra", "lápiz", "papel", "cuento", "historia", "palabra", "letra", "número", "hoja", "flor",
      "tierra", "fuego", "viento", "nube", "estrella", "invierno", "verano", "otoño", "primavera",
      "semana", "mañana", "tarde", "hoy", "ayer", "siempre", "nunca", "bien", "mal", "mejor", "peor",
      "alegría", "tristeza", "bondad", "belleza", "riqueza", "felicidad", "verdad", "ciencia", "paciencia",
      "esperanza", "confianza", "naturaleza", "cocinero", "pianista", "jardinero", "dentista", "panadero",
      "rápidamente", "lentamente", "sentimiento", "conocimiento", "nacimiento", "canción", "atención",
      "lección", "estación", "gusano", "guerra", "guiso", "quince", "química", "hielo", "huevo", "hierba",
      "hormiga", "hueso", "yema", "yegua", "ayuda", "playa", "rayo", "llama", "pollo", "sello", "valle",
      "cebolla", "cereza", "cigüeña", "pingüino", "zumo", "taza", "pozo", "lazo", "jefe", "joven", "ojo",
      "rojo", "caja", "viaje", "bajo", "vaso", "vela", "vino", "bote", "barco", "bolsa", "bota", "brazo"};
  return words;
}

// Pseudo-words from Spanish-like syllables, some carrying a derivational suffix.
inline std::vector<std::pair<std::string, std::uint64_t>> spanish_lexicon(std::size_t size, std::uint64_t seed) {
  static const std::vector<std::string> onsets = {"b", "c", "d", "f", "g", "l", "m", "n", "p", "r", "s",
                                                  "t", "v", "ll", "ch", "j", "z", "br", "pl", "tr", "cr",
                                                  "gr", "fl", "h", "qu", "gu", "ñ", "y"};
  static const std::vector<std::string> medial = {"rr", "l", "n", "s", "t", "d", "m", "r", "c", "b", "v", "ll"};
  static const std::vector<std::string> vowels = {"a", "e", "i", "o", "u", "a", "e", "o"};
  static const std::vector<std::string> suffixes = {"ción", "miento", "oso", "osa", "able", "ando", "iendo",
                                                    "ado", "ido", "dad", "eza", "ero", "ista", "mente",
                                                    "anza", "encia", "ura", "ito", "ita"};
  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& v) -> const std::string& { return v[rng() % v.size()]; };

  std::vector<std::string> words;
  std::set<std::string> seen;
  for (const auto& w : common_spanish_words()) {
    if (seen.insert(w).second) words.push_back(w);
  }
  std::vector<std::pair<double, std::string>> pseudo;
  while (words.size() + pseudo.size() < size) {
    std::string w;
    const auto syllables = 2 + rng() % 3;
    for (std::size_t k = 0; k < syllables; ++k) {
      std::string onset = k == 0 ? pick(onsets) : pick(medial);
      std::string vowel = pick(vowels);
      // qu and gu only before e and i
      if (onset == "qu" || onset == "gu") vowel = rng() % 2 ? "e" : "i";
      w += onset + vowel;
    }
    if (rng() % 100 < 40) {
      const auto& s = pick(suffixes);
      if (!w.empty() && std::string("aeiou").find(w.back()) != std::string::npos &&
          std::string("aeioó").find(s[0]) != std::string::npos) {
        w.pop_back();
      }
      w += s;
    } else if (rng() % 3 == 0) {
      w += rng() % 2 ? "r" : "s";
    }
    if (!seen.insert(w).second) continue;
    // shorter pseudo-words tend to be more frequent
    const double noise = static_cast<double>(rng() % 1000) / 1000.0;
    pseudo.emplace_back(static_cast<double>(w.size()) + 4.0 * noise, w);
  }
  std::sort(pseudo.begin(), pseudo.end());
  for (auto& [key, w] : pseudo) words.push_back(std::move(w));

  std::vector<std::pair<std::string, std::uint64_t>> out;
  out.reserve(words.size());
  for (std::size_t r = 0; r < words.size(); ++r) {
    out.emplace_back(words[r], static_cast<std::uint64_t>(std::llround(5e6 / std::pow(r + 1.0, 1.05))) + 1);
  }
  return out;
}

struct CohortVariable {
  const char* name;
  double baseline;
  double spread;
  double experimental_change;
  double control_change;
  double change_sd;
  double lo, hi;  // clamp range
  bool integral;  // Likert-style averages rounded to 0.5
};

inline const std::vector<CohortVariable>& cohort_variables() {
  static const std::vector<CohortVariable> vars = {
      {"writing_words_with_errors", 28.5, 8.0, -5.0, -2.3, 16.0, 0.0, 100.0, false},
      {"writing_errors_per_word", 0.34, 0.08, -0.07, 0.03, 0.23, 0.0, 5.0, false},
      {"writing_errors_per_wrong_word", 1.13, 0.10, -0.17, 0.16, 0.5, 1.0, 5.0, false},
      {"reading_errors_per_word", 0.12, 0.03, -0.011, -0.015, 0.11, 0.0, 1.0, false},
      {"subjective_writing", 3.36, 0.7, 0.33, 0.26, 1.0, 1.0, 5.0, true},
      {"subjective_reading", 3.51, 0.7, 0.45, 0.23, 1.0, 1.0, 5.0, true}};
  return vars;
}

// A crossover cohort: `complete` children with all three tests plus
// `incomplete` children missing the third one. Groups alternate A, B.
inline std::vector<errata::StudyRecord> study_cohort(std::size_t complete, std::size_t incomplete,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<errata::StudyRecord> out;
  const auto total = complete + incomplete;
  for (std::size_t c = 0; c < total; ++c) {
    const std::string id = "c" + std::to_string(c + 1);
    const char group = c % 2 == 0 ? 'A' : 'B';
    const int tests = c < complete ? 3 : 2;
    for (const auto& v : cohort_variables()) {
      double value = v.baseline + v.spread * gauss(rng);
      const double exp_change = v.experimental_change + v.change_sd * gauss(rng);
      const double ctl_change = v.control_change + v.change_sd * gauss(rng);
      const double phase[2] = {group == 'A' ? exp_change : ctl_change, group == 'A' ? ctl_change : exp_change};
      for (int t = 0; t < tests; ++t) {
        if (t > 0) value += phase[t - 1];
        double shown = std::clamp(value, v.lo, v.hi);
        if (v.integral) shown = std::round(shown * 2.0) / 2.0;
        out.push_back({id, group, t + 1, v.name, shown});
      }
    }
  }
  return out;
}

// Pairs (wrong, correct) made by corrupting common words with one error each,
// cycling through letter, boundary and ending errors.
inline std::vector<std::pair<std::string, std::string>> spanish_error_corpus(std::size_t per_kind,
                                                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> ascii;
  for (const auto& w : common_spanish_words()) {
    const bool plain = std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    if (plain && w.size() >= 4) ascii.push_back(w);
  }
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::pair<std::string, std::string>> seen;
  auto add = [&](std::string wrong, const std::string& correct) {
    if (wrong != correct && seen.emplace(wrong, correct).second) out.emplace_back(std::move(wrong), correct);
  };
  auto shuffled = [&] {
    auto v = ascii;
    std::shuffle(v.begin(), v.end(), rng);
    return v;
  };

  static const std::vector<std::pair<std::string, std::string>> swaps = {
      {"v", "b"}, {"b", "v"}, {"ll", "y"}, {"y", "ll"}, {"z", "s"}, {"ce", "se"},
      {"ci", "si"}, {"ge", "je"}, {"gi", "ji"}, {"qu", "k"}, {"j", "g"}};
  std::size_t made = 0;
  for (const auto& w : shuffled()) {
    if (made == per_kind) break;
    for (const auto& [from, to] : swaps) {
      const auto at = w.find(from);
      if (at == std::string::npos) continue;
      add(w.substr(0, at) + to + w.substr(at + from.size()), w);
      ++made;
      break;
    }
  }
  made = 0;
  for (const auto& w : shuffled()) {  // omissions
    if (made == per_kind) break;
    const auto h = w.find('h');
    const auto at = h != std::string::npos ? h : 1 + rng() % (w.size() - 2);
    add(w.substr(0, at) + w.substr(at + 1), w);
    ++made;
  }
  made = 0;
  for (const auto& w : shuffled()) {  // insertions: a doubled consonant
    if (made == per_kind) break;
    for (std::size_t at = 1; at + 1 < w.size(); ++at) {
      if (std::string("nstmdp").find(w[at]) == std::string::npos || w[at + 1] == w[at] || w[at - 1] == w[at]) continue;
      add(w.substr(0, at + 1) + w[at] + w.substr(at + 1), w);
      ++made;
      break;
    }
  }
  made = 0;
  for (const auto& w : shuffled()) {  // transpositions
    if (made == per_kind) break;
    const auto at = 1 + rng() % (w.size() - 2);
    if (w[at] == w[at + 1]) continue;
    std::string t = w;
    std::swap(t[at], t[at + 1]);
    add(t, w);
    ++made;
  }
  static const std::vector<std::pair<std::string, std::string>> boundary = {
      {"aveces", "a veces"},     {"derepente", "de repente"}, {"sinembargo", "sin embargo"},
      {"porfavor", "por favor"}, {"depronto", "de pronto"},   {"alomejor", "a lo mejor"},
      {"en cima", "encima"},     {"a demás", "además"},       {"gira sol", "girasol"},
      {"tam bién", "también"},   {"por que", "porque"},       {"entre tanto", "entretanto"}};
  for (std::size_t k = 0; k < std::min(per_kind, boundary.size()); ++k) add(boundary[k].first, boundary[k].second);
  static const std::vector<std::pair<std::string, std::string>> endings = {
      {"miento", "ción"}, {"oso", "ero"}, {"mente", "miento"}, {"eza", "ura"}, {"dad", "eza"},
      {"anza", "encia"},  {"encia", "anza"}, {"ero", "ista"},  {"ista", "ero"}, {"iendo", "ando"},
      {"ando", "iendo"},  {"ción", "miento"}};
  made = 0;
  for (const auto& w : common_spanish_words()) {
    if (made == per_kind) break;
    for (const auto& [from, to] : endings) {
      if (w.size() < from.size() + 4 || w.compare(w.size() - from.size(), from.size(), from) != 0) continue;
      add(w.substr(0, w.size() - from.size()) + to, w);
      ++made;
      break;
    }
  }
  return out;
}

}  // namespace synthetic
