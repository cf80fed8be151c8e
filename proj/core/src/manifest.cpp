#include "eegclf/manifest.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "eegclf/errors.hpp"
#include "eegclf/recording_io.hpp"

namespace eegclf {

namespace {

using nlohmann::json;

LabelSpan span_from_json(const json& j) {
    if (!j.contains("start_s") || !j.contains("end_s") || !j.contains("labels")) {
        throw Error("manifest span needs start_s, end_s and labels");
    }
    LabelSpan span;
    span.start_s = j.at("start_s").get<double>();
    span.end_s = j.at("end_s").get<double>();
    for (const auto& [kind, value] : j.at("labels").items()) {
        span.labels[kind] = value.get<std::string>();
    }
    span.validate();
    return span;
}

json span_to_json(const LabelSpan& span) {
    json labels = json::object();
    for (const auto& [kind, value] : span.labels) {
        labels[kind] = value;
    }
    return json{{"start_s", span.start_s}, {"end_s", span.end_s}, {"labels", labels}};
}

}  // namespace

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw Error("cannot open manifest: " + path.string());
    }
    json doc;
    try {
        is >> doc;
    } catch (const json::parse_error& e) {
        throw Error("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_array()) {
        throw Error("manifest must be a JSON array of recording entries");
    }

    std::vector<ManifestEntry> entries;
    entries.reserve(doc.size());
    for (const auto& item : doc) {
        if (!item.contains("path") || !item.contains("subject") || !item.contains("spans")) {
            throw Error("manifest entry needs path, subject and spans");
        }
        ManifestEntry e;
        e.path = item.at("path").get<std::string>();
        e.subject = item.at("subject").get<std::string>();
        for (const auto& s : item.at("spans")) {
            e.spans.push_back(span_from_json(s));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

void save_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    json doc = json::array();
    for (const auto& e : entries) {
        json spans = json::array();
        for (const auto& s : e.spans) {
            spans.push_back(span_to_json(s));
        }
        doc.push_back(json{{"path", e.path}, {"subject", e.subject}, {"spans", spans}});
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw Error("cannot write manifest: " + path.string());
    }
    os << doc.dump(2) << '\n';
}

Recording load_recording_entry(const std::filesystem::path& manifest_dir,
                               const ManifestEntry& entry) {
    std::filesystem::path p(entry.path);
    if (p.is_relative()) {
        p = manifest_dir / p;
    }
    Recording r = load_recording(p);
    r.subject_id = entry.subject;
    r.spans = entry.spans;
    r.validate();
    return r;
}

}  // namespace eegclf
