#include "eventflow/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace eventflow::text {

namespace {

bool is_cjk(UChar32 c) {
    if (u_hasBinaryProperty(c, UCHAR_IDEOGRAPHIC)) return true;
    UErrorCode status = U_ZERO_ERROR;
    const UScriptCode script = uscript_getScript(c, &status);
    if (U_FAILURE(status)) return false;
    return script == USCRIPT_HAN || script == USCRIPT_HIRAGANA || script == USCRIPT_KATAKANA ||
           script == USCRIPT_HANGUL;
}

template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
    const auto* data = reinterpret_cast<const uint8_t*>(s.data());
    const auto length = static_cast<int32_t>(s.size());
    int32_t i = 0;
    while (i < length) {
        const int32_t start = i;
        UChar32 c = 0;
        U8_NEXT(data, i, length, c);
        if (c < 0) c = 0xFFFD;
        fn(c, static_cast<std::size_t>(start), static_cast<std::size_t>(i));
    }
}

}  // namespace

std::size_t count_tokens(std::string_view utf8) {
    std::size_t tokens = 0;
    bool in_word = false;
    for_each_code_point(utf8, [&](UChar32 c, std::size_t, std::size_t) {
        if (u_isUWhiteSpace(c)) {
            in_word = false;
        } else if (is_cjk(c)) {
            ++tokens;
            in_word = false;
        } else if (!in_word) {
            ++tokens;
            in_word = true;
        }
    });
    return tokens;
}

std::string truncate_tokens(std::string_view utf8, std::size_t budget) {
    std::size_t tokens = 0;
    bool in_word = false;
    std::size_t cut = 0;
    bool stop = false;
    for_each_code_point(utf8, [&](UChar32 c, std::size_t begin, std::size_t end) {
        if (stop) return;
        if (u_isUWhiteSpace(c)) {
            in_word = false;
            return;
        }
        const bool starts_token = is_cjk(c) || !in_word;
        in_word = !is_cjk(c);
        if (starts_token) {
            if (tokens == budget) {
                stop = true;
                return;
            }
            ++tokens;
        }
        cut = end;
        (void)begin;
    });
    return trim(utf8.substr(0, cut));
}

std::string fold(std::string_view utf8) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    icu::UnicodeString source = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    icu::UnicodeString normalized = nfc->normalize(source, status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
    normalized.foldCase();
    // Folding can denormalize a few sequences; renormalize.
    normalized = nfc->normalize(normalized, status);
    std::string out;
    normalized.toUTF8String(out);
    return trim(out);
}

std::vector<std::string> word_tokens(std::string_view utf8) {
    const std::string folded = fold(utf8);
    std::vector<std::string> tokens;
    std::string current;
    for_each_code_point(folded, [&](UChar32 c, std::size_t begin, std::size_t end) {
        if (is_cjk(c)) {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
            tokens.emplace_back(folded.substr(begin, end - begin));
        } else if (u_isalnum(c)) {
            current.append(folded, begin, end - begin);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    });
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace eventflow::text
