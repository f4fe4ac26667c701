#pragma once

#include <cctype>
#include <map>
#include <string>

namespace fpme::app {

/// Line number of every value in a JSON document, keyed by JSON pointer.
/// Only used to anchor error messages; the document is assumed to have
/// parsed already, so malformed input just yields a partial map.
class JsonLineIndex {
public:
    explicit JsonLineIndex(const std::string& text) : s_(text) { value(""); }

    int line(const std::string& pointer) const
    {
        auto it = lines_.find(pointer);
        if (it != lines_.end()) {
            return it->second;
        }
        // Fall back to the nearest enclosing value.
        std::string p = pointer;
        while (!p.empty()) {
            p.erase(p.rfind('/'));
            it = lines_.find(p);
            if (it != lines_.end()) {
                return it->second;
            }
        }
        return 1;
    }

private:
    void skip_ws()
    {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            if (s_[i_] == '\n') {
                ++line_;
            }
            ++i_;
        }
    }

    std::string string_token()
    {
        std::string out;
        ++i_; // opening quote
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
                ++i_;
            }
            out.push_back(s_[i_++]);
        }
        ++i_;
        return out;
    }

    static std::string escape(const std::string& key)
    {
        std::string out;
        for (char c : key) {
            if (c == '~') {
                out += "~0";
            } else if (c == '/') {
                out += "~1";
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

    void value(const std::string& ptr)
    {
        skip_ws();
        if (i_ >= s_.size()) {
            return;
        }
        lines_.emplace(ptr, line_);
        const char c = s_[i_];
        if (c == '{') {
            ++i_;
            for (;;) {
                skip_ws();
                if (i_ >= s_.size() || s_[i_] == '}') {
                    ++i_;
                    return;
                }
                if (s_[i_] == ',') {
                    ++i_;
                    continue;
                }
                if (s_[i_] != '"') {
                    return;
                }
                const int key_line = line_;
                const std::string key = string_token();
                skip_ws();
                if (i_ < s_.size() && s_[i_] == ':') {
                    ++i_;
                }
                const std::string child = ptr + "/" + escape(key);
                lines_.emplace(child, key_line);
                value(child);
            }
        } else if (c == '[') {
            ++i_;
            std::size_t idx = 0;
            for (;;) {
                skip_ws();
                if (i_ >= s_.size() || s_[i_] == ']') {
                    ++i_;
                    return;
                }
                if (s_[i_] == ',') {
                    ++i_;
                    continue;
                }
                value(ptr + "/" + std::to_string(idx++));
            }
        } else if (c == '"') {
            string_token();
        } else {
            while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != ',' &&
                   s_[i_] != '}' && s_[i_] != ']') {
                ++i_;
            }
        }
    }

    std::string s_;
    std::size_t i_ = 0;
    int line_ = 1;
    std::map<std::string, int> lines_;
};

} // namespace fpme::app
