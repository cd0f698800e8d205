#include <charconv>
#include <fstream>
#include <sstream>

#include "revpat/error.hpp"
#include "revpat/gp.hpp"

namespace revpat {
namespace {

std::string trim(const std::string& text) {
  const auto b = text.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = text.find_last_not_of(" \t\r");
  return text.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw InputError("gp config: invalid value '" + value + "' for '" + key + "'");
  }
  return out;
}

template <typename T>
std::string format_number(T value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

}  // namespace

void validate(const GpConfig& c) {
  auto fail = [](const std::string& what) { throw InputError("gp config: " + what); };
  if (c.population_size < 2) fail("population_size must be >= 2");
  if (c.tournament_size < 2 || c.tournament_size > c.population_size) {
    fail("tournament_size must be in [2, population_size]");
  }
  if (c.elitism_count >= c.population_size) fail("elitism_count must be < population_size");
  if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0)) fail("crossover_rate must be in [0, 1]");
  if (!(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0)) fail("mutation_rate must be in [0, 1]");
  if (!(c.beta > 0.0)) fail("beta must be > 0");
  if (c.max_depth < 2) fail("max_depth must be >= 2");
  if (c.max_children < 2) fail("max_children must be >= 2");
}

void set_gp_option(GpConfig& c, const std::string& key, const std::string& value) {
  if (key == "population_size") c.population_size = parse_number<std::size_t>(key, value);
  else if (key == "max_generations") c.max_generations = parse_number<std::size_t>(key, value);
  else if (key == "max_group_stall") c.max_group_stall = parse_number<std::size_t>(key, value);
  else if (key == "max_depth") c.max_depth = parse_number<std::size_t>(key, value);
  else if (key == "max_children") c.max_children = parse_number<std::size_t>(key, value);
  else if (key == "tournament_size") c.tournament_size = parse_number<std::size_t>(key, value);
  else if (key == "elitism_count") c.elitism_count = parse_number<std::size_t>(key, value);
  else if (key == "crossover_rate") c.crossover_rate = parse_number<double>(key, value);
  else if (key == "mutation_rate") c.mutation_rate = parse_number<double>(key, value);
  else if (key == "beta") c.beta = parse_number<double>(key, value);
  else if (key == "pool_top_k") c.pool_top_k = parse_number<std::size_t>(key, value);
  else if (key == "cross_class_cutoff") c.cross_class_cutoff = parse_number<std::size_t>(key, value);
  else if (key == "rng_seed") c.rng_seed = parse_number<std::uint64_t>(key, value);
  else throw InputError("gp config: unknown key '" + key + "'");
}

GpConfig parse_gp_config(std::istream& in, GpConfig base) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw InputError("gp config line " + std::to_string(number) + ": expected 'key = value'");
    }
    set_gp_option(base, trim(content.substr(0, eq)), trim(content.substr(eq + 1)));
  }
  validate(base);
  return base;
}

GpConfig load_gp_config(const std::filesystem::path& path, GpConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open gp config " + path.string());
  return parse_gp_config(in, base);
}

std::string to_text(const GpConfig& c) {
  std::ostringstream out;
  out << "population_size = " << c.population_size << "\n"
      << "max_generations = " << c.max_generations << "\n"
      << "max_group_stall = " << c.max_group_stall << "\n"
      << "max_depth = " << c.max_depth << "\n"
      << "max_children = " << c.max_children << "\n"
      << "tournament_size = " << c.tournament_size << "\n"
      << "elitism_count = " << c.elitism_count << "\n"
      << "crossover_rate = " << format_number(c.crossover_rate) << "\n"
      << "mutation_rate = " << format_number(c.mutation_rate) << "\n"
      << "beta = " << format_number(c.beta) << "\n"
      << "pool_top_k = " << c.pool_top_k << "\n"
      << "cross_class_cutoff = " << c.cross_class_cutoff << "\n"
      << "rng_seed = " << c.rng_seed << "\n";
  return out.str();
}

}  // namespace revpat
