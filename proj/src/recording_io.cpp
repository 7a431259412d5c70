#include "vibro/recording_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "vibro/error.hpp"

namespace vibro {

namespace {

constexpr const char* kRateHeader = "# sample_rate_hz=";
constexpr const char* kLabelHeader = "# label=";

double parse_number(std::string_view text, std::size_t line_no) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw InputError("line " + std::to_string(line_no) + ": '" + std::string(text) +
                         "' is not a number");
    }
    return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string format_number(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

bool Recording::has_channel(const std::string& name) const {
    for (const auto& [channel_name, samples] : channels) {
        (void)samples;
        if (channel_name == name) return true;
    }
    return false;
}

const std::vector<double>& Recording::channel(const std::string& name) const {
    for (const auto& [channel_name, samples] : channels) {
        if (channel_name == name) return samples;
    }
    throw InputError("recording has no channel named '" + name + "'");
}

void Recording::validate() const {
    if (!(sample_rate > 0.0)) throw InputError("recording sample rate must be positive");
    if (channels.empty()) throw InputError("recording has no channels");
    const std::size_t n = channels.front().second.size();
    if (n < 2) throw InputError("recording channels need at least 2 samples");
    std::set<std::string> names;
    for (const auto& [name, samples] : channels) {
        if (samples.size() != n) throw InputError("recording channels differ in length");
        if (!names.insert(name).second) throw InputError("duplicate channel name '" + name + "'");
    }
}

Recording parse_recording(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open recording file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();

    Recording recording;
    recording.digest = fnv1a64_hex(content.data(), content.size());

    std::istringstream lines(content);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(lines, line) || !line.starts_with(kRateHeader)) {
        throw InputError(path + ": first line must be '" + kRateHeader + "<rate>'");
    }
    ++line_no;
    recording.sample_rate = parse_number(std::string_view(line).substr(std::string(kRateHeader).size()), line_no);
    if (!(recording.sample_rate > 0.0)) {
        throw InputError(path + ": sample rate must be positive");
    }

    if (!std::getline(lines, line)) throw InputError(path + ": missing header row");
    ++line_no;
    if (line.starts_with(kLabelHeader)) {
        recording.label = line.substr(std::string(kLabelHeader).size());
        if (!std::getline(lines, line)) throw InputError(path + ": missing header row");
        ++line_no;
    }

    const auto header = split_csv(line);
    std::size_t column = 0;
    const bool has_time = !header.empty() && header[0] == "t";
    if (has_time) ++column;
    for (const char* required : {"ax", "ay", "az"}) {
        if (column >= header.size() || header[column] != required) {
            throw InputError("line " + std::to_string(line_no) + ": header must name channels " +
                             "t,ax,ay,az,tacho with t and tacho optional");
        }
        ++column;
    }
    bool has_tacho = false;
    if (column < header.size()) {
        if (header[column] != "tacho" || column + 1 != header.size()) {
            throw InputError("line " + std::to_string(line_no) + ": header must name channels " +
                             "t,ax,ay,az,tacho with t and tacho optional");
        }
        has_tacho = true;
    }

    recording.channels.emplace_back("ax", std::vector<double>{});
    recording.channels.emplace_back("ay", std::vector<double>{});
    recording.channels.emplace_back("az", std::vector<double>{});
    if (has_tacho) recording.channels.emplace_back("tacho", std::vector<double>{});

    const double dt = 1.0 / recording.sample_rate;
    double previous_time = 0.0;
    std::size_t row = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty() && lines.eof()) break;
        const auto fields = split_csv(line);
        if (fields.size() != header.size()) {
            throw InputError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " columns, got " +
                             std::to_string(fields.size()));
        }
        std::size_t f = 0;
        if (has_time) {
            const double t = parse_number(fields[f++], line_no);
            if (row > 0 && std::abs(t - previous_time - dt) > 0.001 * dt) {
                throw InputError("line " + std::to_string(line_no) +
                                 ": time step deviates from 1/sample_rate by more than 0.1%");
            }
            previous_time = t;
        }
        for (auto& [name, samples] : recording.channels) {
            (void)name;
            samples.push_back(parse_number(fields[f++], line_no));
        }
        ++row;
    }

    recording.validate();
    return recording;
}

void write_recording(const Recording& recording, const std::string& path) {
    recording.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write recording file: " + path);

    out << kRateHeader << format_number(recording.sample_rate) << "\n";
    if (!recording.label.empty()) out << kLabelHeader << recording.label << "\n";

    out << "t";
    for (const auto& [name, samples] : recording.channels) {
        (void)samples;
        out << ',' << name;
    }
    out << "\n";

    const std::size_t n = recording.length();
    for (std::size_t i = 0; i < n; ++i) {
        out << format_number(static_cast<double>(i) / recording.sample_rate);
        for (const auto& [name, samples] : recording.channels) {
            (void)name;
            out << ',' << format_number(samples[i]);
        }
        out << "\n";
    }
    if (!out) throw InputError("failed while writing recording file: " + path);
}

std::string fnv1a64_hex(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 1469598103934665603ull;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 1099511628211ull;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

} // namespace vibro
