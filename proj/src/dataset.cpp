#include "evonet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "evonet/dlopt.hpp"
#include "evonet/rng.hpp"

namespace evonet {

Dataset make_xor() {
    Dataset data;
    data.inputs = Mat(4, 2);
    data.targets = Mat(4, 1);
    for (std::size_t p = 0; p < 4; ++p) {
        const double a = static_cast<double>(p & 1);
        const double b = static_cast<double>((p >> 1) & 1);
        data.inputs.at(p, 0) = a;
        data.inputs.at(p, 1) = b;
        data.targets.at(p, 0) = (a != b) ? 1.0 : 0.0;
    }
    return data;
}

Dataset make_parity(int bits) {
    if (bits < 1) throw ParamError("parity: needs at least one bit");
    if (bits > 16) throw ParamError("parity: more than 16 bits is past the desk-scale guard");
    const std::size_t patterns = std::size_t{1} << bits;
    Dataset data;
    data.inputs = Mat(patterns, static_cast<std::size_t>(bits));
    data.targets = Mat(patterns, 1);
    for (std::size_t p = 0; p < patterns; ++p) {
        int ones = 0;
        for (int b = 0; b < bits; ++b) {
            const int bit = static_cast<int>((p >> b) & 1);
            data.inputs.at(p, static_cast<std::size_t>(b)) = static_cast<double>(bit);
            ones += bit;
        }
        data.targets.at(p, 0) = static_cast<double>(ones % 2);
    }
    return data;
}

Dataset load_csv(const std::string& path, int inputs, int outputs) {
    if (inputs < 1 || outputs < 1)
        throw ParamError("csv: declared input and output column counts must be >= 1");
    std::ifstream file(path);
    if (!file) throw DataError("csv: cannot open " + path);

    const std::size_t width = static_cast<std::size_t>(inputs + outputs);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(file, line)) {
        ++line_number;
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream row(line);
        std::string cell;
        std::size_t column = 0;
        while (std::getline(row, cell, ',')) {
            ++column;
            std::size_t consumed = 0;
            double value = 0.0;
            try {
                value = std::stod(cell, &consumed);
            } catch (const std::exception&) {
                consumed = 0;
            }
            while (consumed < cell.size() && std::isspace(static_cast<unsigned char>(cell[consumed])))
                ++consumed;
            if (consumed != cell.size() || cell.empty())
                throw ParseError("csv: non-numeric cell at row " + std::to_string(line_number) +
                                 ", column " + std::to_string(column));
            cells.push_back(value);
        }
        if (cells.size() != width)
            throw ParseError("csv: row " + std::to_string(line_number) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(width));
        rows.push_back(std::move(cells));
    }
    if (rows.empty()) throw DataError("csv: no data rows in " + path);

    Dataset data;
    data.inputs = Mat(rows.size(), static_cast<std::size_t>(inputs));
    data.targets = Mat(rows.size(), static_cast<std::size_t>(outputs));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < inputs; ++c)
            data.inputs.at(r, static_cast<std::size_t>(c)) = rows[r][static_cast<std::size_t>(c)];
        for (int c = 0; c < outputs; ++c)
            data.targets.at(r, static_cast<std::size_t>(c)) =
                rows[r][static_cast<std::size_t>(inputs + c)];
    }
    return data;
}

Dataset load_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    if (spec.split_fraction <= 0.0 || spec.split_fraction > 1.0)
        throw ParamError("dataset: split_fraction must be in (0, 1]");

    Dataset data;
    if (spec.source == "xor") {
        data = make_xor();
    } else if (spec.source.rfind("parity:", 0) == 0) {
        int bits = 0;
        try {
            bits = std::stoi(spec.source.substr(7));
        } catch (const std::exception&) {
            throw ParseError("dataset: cannot parse bit count in \"" + spec.source + "\"");
        }
        data = make_parity(bits);
    } else {
        data = load_csv(spec.source, spec.csv_inputs, spec.csv_outputs);
    }

    if (spec.whiten_inputs && data.inputs.rows >= 2)
        data.inputs = dlopt::whiten(data.inputs).data;

    std::vector<std::size_t> order(data.patterns());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::derive(seed, "split");
    rng.shuffle(order);
    auto train_count = static_cast<std::size_t>(
        std::floor(spec.split_fraction * static_cast<double>(order.size())));
    train_count = std::clamp<std::size_t>(train_count, 1, order.size());
    data.train_index.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(train_count));
    data.val_index.assign(order.begin() + static_cast<std::ptrdiff_t>(train_count), order.end());
    std::sort(data.train_index.begin(), data.train_index.end());
    std::sort(data.val_index.begin(), data.val_index.end());
    data.check();
    return data;
}

}  // namespace evonet
