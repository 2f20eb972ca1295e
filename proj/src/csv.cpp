// SPDX-License-Identifier: Apache-2.0
//
// airfl: over-the-air federated learning simulator with pairwise-cancellable noise
// Copyright (C) 2026 The airfl authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "airfl/error.hpp"
#include "airfl/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace airfl
{

namespace
{
void append_number(std::string &out, double x, bool integer)
{
    char buf[64];
    std::to_chars_result res;
    if (integer && std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e18)
        res = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(x));
    else
        res = std::to_chars(buf, buf + sizeof buf, x);
    out.append(buf, res.ptr);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;)
    {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}
} // namespace

std::size_t ResultTable::column_index(std::string_view name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name)
            return i;
    fail(ErrorCode::invalid_argument, "no column named '" + std::string(name) + "'");
}

double ResultTable::at(std::size_t row, std::string_view column) const
{
    require(row < rows.size(), ErrorCode::invalid_argument, "row index out of range");
    return rows[row][column_index(column)];
}

std::string ResultTable::to_csv() const
{
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i)
    {
        if (i)
            out += ',';
        out += columns[i];
    }
    out += '\n';
    for (const auto &row : rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
        {
            if (i)
                out += ',';
            append_number(out, row[i], i < integer_column.size() && integer_column[i]);
        }
        out += '\n';
    }
    return out;
}

ResultTable parse_csv(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!line.empty())
            lines.push_back(line);
        start = end + 1;
    }
    require(!lines.empty(), ErrorCode::invalid_argument, "CSV has no header row");

    ResultTable table;
    for (auto f : split_fields(lines.front()))
        table.columns.emplace_back(f);
    table.integer_column.assign(table.columns.size(), 1);

    for (std::size_t l = 1; l < lines.size(); ++l)
    {
        const auto fields = split_fields(lines[l]);
        if (fields.size() != table.columns.size())
            fail(ErrorCode::invalid_argument, "CSV row " + std::to_string(l) + " has the wrong number of fields");
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
        {
            const auto f = fields[i];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), row[i]);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
                fail(ErrorCode::invalid_argument, "CSV field '" + std::string(f) + "' is not a number");
            if (f.find_first_of(".eEni") != std::string_view::npos)
                table.integer_column[i] = 0;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_csv(const ResultTable &table, const std::filesystem::path &path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorCode::output_io, "cannot open output file '" + path.string() + "'");
    const auto csv = table.to_csv();
    out.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    out.flush();
    if (!out)
        fail(ErrorCode::output_io, "cannot write output file '" + path.string() + "'");
}

} // namespace airfl
