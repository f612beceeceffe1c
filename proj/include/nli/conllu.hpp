#ifndef NLI_CONLLU_HPP
#define NLI_CONLLU_HPP

// CoNLL-U reader/writer for labelled documents.
//
// Document boundaries come from `# newdoc id = ...` comments. Document
// metadata rides in `# meta key = value` comments (label, proficiency,
// source, char_length). Fine-grained tags live in XPOS, universal tags in
// UPOS, named-entity BIO tags in MISC under `NE=`.

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nli/corpus.hpp"
#include "nli/error.hpp"
#include "nli/util.hpp"

namespace nli {

struct ConlluDefaults {
  std::optional<std::string> label;  // used when a document has no `meta label`
  std::optional<int> proficiency;
  std::string source;
};

namespace detail {

inline std::optional<long> parse_int(std::string_view s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

inline std::string field_or_empty(const std::string& f) { return f == "_" ? std::string() : f; }

class ConlluReader {
 public:
  explicit ConlluReader(const ConlluDefaults& defaults) : defaults_(defaults) {}

  std::vector<AnnotatedDocument> read(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) {
        end_sentence();
      } else if (line[0] == '#') {
        comment(line);
      } else {
        token(line);
      }
    }
    end_sentence();
    end_document();
    return std::move(docs_);
  }

 private:
  struct Pending {
    AnnotatedDocument doc;
    bool has_label = false;
    std::optional<std::size_t> meta_chars;
    std::size_t text_chars = 0;
    std::size_t text_lines = 0;
    std::size_t token_chars = 0;  // reconstructed from tokens and SpaceAfter
  };

  void comment(const std::string& line) {
    const std::string_view body = trim(std::string_view(line).substr(1));
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) return;
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key == "newdoc id") {
      end_sentence();
      end_document();
      current_.emplace();
      current_->doc.doc_id = value;
      current_->doc.source = defaults_.source;
      current_->doc.proficiency = defaults_.proficiency;
      return;
    }
    if (!current_) return;  // corpus-level comments before the first document
    if (key == "meta label") {
      current_->doc.label = value;
      current_->has_label = true;
    } else if (key == "meta proficiency") {
      const auto v = parse_int(value);
      if (!v) throw ParseError("bad proficiency '" + value + "'", line_no_);
      current_->doc.proficiency = static_cast<int>(*v);
    } else if (key == "meta source") {
      current_->doc.source = value;
    } else if (key == "meta char_length") {
      const auto v = parse_int(value);
      if (!v || *v < 0) throw ParseError("bad char_length '" + value + "'", line_no_);
      current_->meta_chars = static_cast<std::size_t>(*v);
    } else if (key == "text") {
      // only consulted when no explicit char_length is present
      current_->text_chars += utf8_length(value);
      ++current_->text_lines;
    }
  }

  void token(const std::string& line) {
    auto fields = split(line, '\t');
    if (fields.size() != 10)
      throw ParseError("expected 10 tab-separated fields, found " +
                           std::to_string(fields.size()),
                       line_no_);
    const std::string& id = fields[0];
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos)
      return;  // multiword ranges and empty nodes carry no token of their own
    if (!current_) throw ParseError("token line outside any `# newdoc` document", line_no_);
    const auto idv = parse_int(id);
    if (!idv || *idv != static_cast<long>(sentence_.size()) + 1)
      throw ParseError("token id '" + id + "' out of sequence", line_no_);

    TokenAnnotation tok;
    tok.surface = fields[1];
    if (tok.surface.empty() || tok.surface.find(' ') != std::string::npos)
      throw ParseError("empty or space-containing FORM", line_no_);
    tok.lemma = field_or_empty(fields[2]);
    tok.coarse_pos = field_or_empty(fields[3]);
    tok.pos = field_or_empty(fields[4]);
    tok.dep_label = field_or_empty(fields[7]);
    if (fields[6] != "_") {
      const auto h = parse_int(fields[6]);
      if (!h || *h < 0) throw ParseError("bad HEAD '" + fields[6] + "'", line_no_);
      if (*h > 0) tok.head = static_cast<std::size_t>(*h - 1);
      if (tok.dep_label.empty())
        throw ParseError("HEAD given without DEPREL", line_no_);
    } else if (!tok.dep_label.empty()) {
      throw ParseError("DEPREL given without HEAD", line_no_);
    }
    tok.is_punct = tok.coarse_pos == "PUNCT";
    bool space_after = true;
    if (fields[9] != "_") {
      for (const auto& item : split(fields[9], '|')) {
        if (item.rfind("NE=", 0) == 0) {
          tok.ne_tag = item.substr(3);
        } else if (item == "Punct=Yes") {
          tok.is_punct = true;
        } else if (item == "Punct=No") {
          tok.is_punct = false;
        } else if (item == "SpaceAfter=No") {
          space_after = false;
        }
      }
    }
    current_->token_chars += utf8_length(tok.surface) + (space_after ? 1 : 0);
    sentence_.push_back(std::move(tok));
  }

  void end_sentence() {
    if (sentence_.empty()) return;
    current_->doc.sentences.push_back(std::move(sentence_));
    sentence_.clear();
  }

  void end_document() {
    if (!current_) return;
    auto& p = *current_;
    if (!p.has_label) {
      if (!defaults_.label)
        throw ValidationError("document '" + p.doc.doc_id + "' has no `# meta label` comment");
      p.doc.label = *defaults_.label;
    }
    if (p.doc.sentences.empty())
      throw ValidationError("document '" + p.doc.doc_id + "' has no sentences");
    if (p.meta_chars) {
      p.doc.char_length = *p.meta_chars;
    } else if (p.text_lines) {
      p.doc.char_length = p.text_chars + p.text_lines - 1;
    } else {
      p.doc.char_length = p.token_chars > 0 ? p.token_chars - 1 : 0;
    }
    validate_document(p.doc);
    docs_.push_back(std::move(p.doc));
    current_.reset();
  }

  ConlluDefaults defaults_;
  std::vector<AnnotatedDocument> docs_;
  std::optional<Pending> current_;
  Sentence sentence_;
  std::size_t line_no_ = 0;
};

}  // namespace detail

inline std::vector<AnnotatedDocument> parse_conllu(std::istream& in,
                                                   const ConlluDefaults& defaults = {}) {
  return detail::ConlluReader(defaults).read(in);
}

inline std::vector<AnnotatedDocument> parse_conllu(const std::string& text,
                                                   const ConlluDefaults& defaults = {}) {
  std::istringstream in(text);
  return parse_conllu(in, defaults);
}

inline void serialize_conllu(std::ostream& out, const AnnotatedDocument& doc) {
  const auto field = [](const std::string& s) -> const std::string& {
    static const std::string underscore = "_";
    return s.empty() ? underscore : s;
  };
  out << "# newdoc id = " << doc.doc_id << '\n';
  out << "# meta label = " << doc.label << '\n';
  if (doc.proficiency) out << "# meta proficiency = " << *doc.proficiency << '\n';
  if (!doc.source.empty()) out << "# meta source = " << doc.source << '\n';
  out << "# meta char_length = " << doc.char_length << '\n';
  for (const auto& sentence : doc.sentences) {
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      const auto& t = sentence[i];
      std::string head = "_";
      if (!t.dep_label.empty()) head = t.head ? std::to_string(*t.head + 1) : "0";
      std::vector<std::string> misc;
      if (!t.ne_tag.empty()) misc.push_back("NE=" + t.ne_tag);
      if (t.is_punct != (t.coarse_pos == "PUNCT"))
        misc.push_back(t.is_punct ? "Punct=Yes" : "Punct=No");
      out << (i + 1) << '\t' << t.surface << '\t' << field(t.lemma) << '\t'
          << field(t.coarse_pos) << '\t' << field(t.pos) << "\t_\t" << head << '\t'
          << field(t.dep_label) << "\t_\t" << (misc.empty() ? "_" : join(misc, "|"))
          << '\n';
    }
    out << '\n';
  }
}

inline void serialize_conllu(std::ostream& out, const std::vector<AnnotatedDocument>& docs) {
  for (const auto& d : docs) serialize_conllu(out, d);
}

inline std::string to_conllu(const std::vector<AnnotatedDocument>& docs) {
  std::ostringstream out;
  serialize_conllu(out, docs);
  return out.str();
}

}  // namespace nli

#endif  // NLI_CONLLU_HPP
