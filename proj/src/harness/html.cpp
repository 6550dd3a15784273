#include "theorygen/harness/html.hpp"

namespace theorygen {

std::string html_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

HtmlPage::HtmlPage(std::string title) : title_(std::move(title)) {}

HtmlPage& HtmlPage::heading(int level, const std::string& text) {
    std::string tag = "h" + std::to_string(level);
    body_ += "<" + tag + ">" + html_escape(text) + "</" + tag + ">\n";
    return *this;
}

HtmlPage& HtmlPage::paragraph(const std::string& text) {
    body_ += "<p>" + html_escape(text) + "</p>\n";
    return *this;
}

HtmlPage& HtmlPage::preformatted(const std::string& text) {
    body_ += "<pre>" + html_escape(text) + "</pre>\n";
    return *this;
}

HtmlPage& HtmlPage::link(const std::string& href, const std::string& text) {
    body_ += "<p><a href=\"" + html_escape(href) + "\">" + html_escape(text) + "</a></p>\n";
    return *this;
}

HtmlPage& HtmlPage::raw(const std::string& html) {
    body_ += html;
    return *this;
}

HtmlPage& HtmlPage::table(const std::vector<std::string>& header,
                          const std::vector<std::vector<std::string>>& rows) {
    body_ += "<table>\n<tr>";
    for (const auto& h : header) body_ += "<th>" + html_escape(h) + "</th>";
    body_ += "</tr>\n";
    for (const auto& row : rows) {
        body_ += "<tr>";
        for (const auto& cell : row) body_ += "<td>" + html_escape(cell) + "</td>";
        body_ += "</tr>\n";
    }
    body_ += "</table>\n";
    return *this;
}

std::string HtmlPage::render() const {
    std::string out = "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>";
    out += html_escape(title_);
    out +=
        "</title>\n<style>\n"
        "body { font: 14px/1.5 sans-serif; color: #333; max-width: 70em; margin: 2em auto; }\n"
        "table { border-collapse: collapse; margin: 1em 0; }\n"
        "td, th { border: 1px solid #bbb; padding: 0.4em 0.7em; text-align: left; }\n"
        "th { background: #eee; }\n"
        "pre { background: #f6f6f6; padding: 0.8em; overflow-x: auto; }\n"
        "h2 { border-bottom: 1px solid #ccc; padding-bottom: 0.2em; }\n"
        "</style>\n</head>\n<body>\n<h1>";
    out += html_escape(title_);
    out += "</h1>\n" + body_ + "</body>\n</html>\n";
    return out;
}

}  // namespace theorygen
