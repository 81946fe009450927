#include "cefr/csv.hpp"

#include "cefr/error.hpp"

namespace cefr::csv {

std::vector<Row> parse(std::string_view text, char delimiter)
{
    if (text.starts_with("\xEF\xBB\xBF")) {
        text.remove_prefix(3);
    }

    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    std::size_t line = 1;
    std::size_t quote_line = 0;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row.front().empty())) {
            rows.push_back(std::move(row));
        }
        row.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            if (!field.empty() || field_was_quoted) {
                throw Error(ErrorCode::MalformedCsv,
                            "unexpected quote at line " + std::to_string(line),
                            {{"line", std::to_string(line)}});
            }
            in_quotes = true;
            field_was_quoted = true;
            quote_line = line;
        } else if (c == delimiter) {
            end_field();
        } else if (c == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') {
                continue;
            }
            end_row();
            ++line;
        } else if (c == '\n') {
            end_row();
            ++line;
        } else {
            if (field_was_quoted) {
                throw Error(ErrorCode::MalformedCsv,
                            "text after closing quote at line " + std::to_string(line),
                            {{"line", std::to_string(line)}});
            }
            field.push_back(c);
        }
    }
    if (in_quotes) {
        throw Error(ErrorCode::MalformedCsv,
                    "unterminated quoted field starting at line " + std::to_string(quote_line),
                    {{"line", std::to_string(quote_line)}});
    }
    if (!field.empty() || field_was_quoted || !row.empty()) {
        end_row();
    }
    return rows;
}

std::string quote(std::string_view field, char delimiter)
{
    if (field.find_first_of(std::string{delimiter, '"', '\r', '\n'}) == std::string_view::npos) {
        return std::string(field);
    }
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(const Row& row, char delimiter)
{
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i != 0) {
            out.push_back(delimiter);
        }
        out += quote(row[i], delimiter);
    }
    out.push_back('\n');
    return out;
}

} // namespace cefr::csv
