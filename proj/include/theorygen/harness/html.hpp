#pragma once

#include <string>
#include <vector>

namespace theorygen {

std::string html_escape(const std::string& text);

/// Minimal static-page builder; everything renders to one self-contained
/// string with a shared stylesheet.
class HtmlPage {
public:
    explicit HtmlPage(std::string title);

    HtmlPage& heading(int level, const std::string& text);
    HtmlPage& paragraph(const std::string& text);
    HtmlPage& preformatted(const std::string& text);
    HtmlPage& link(const std::string& href, const std::string& text);
    HtmlPage& raw(const std::string& html);

    HtmlPage& table(const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

    std::string render() const;

private:
    std::string title_;
    std::string body_;
};

}  // namespace theorygen
