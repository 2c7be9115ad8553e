// Copyright 2026 The LupinSim Authors. All rights reserved.
// Use of this source code is governed by a BSD-style license that can be
// found in the LICENSE file.

#include "lupin/corpus_gen.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <utility>

namespace lupin {
namespace {

// mt19937_64 with modulo draws keeps the byte stream identical across
// platforms; standard distributions would not.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  size_t Pick(size_t bound) { return engine_() % bound; }
  bool Chance(size_t percent) { return Pick(100) < percent; }

  template <typename T>
  const T& Choose(const std::vector<T>& options) {
    return options[Pick(options.size())];
  }

 private:
  std::mt19937_64 engine_;
};

std::string HostFor(int index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "site%04d.test", index);
  return buffer;
}

std::string Attr(Rng& rng, const std::string& name, const std::string& value) {
  std::string out = rng.Chance(50) ? name : [&] {
    std::string upper = name;
    for (char& c : upper) c = static_cast<char>(c >= 'a' && c <= 'z' ? c - 32 : c);
    return upper;
  }();
  out += "=";
  switch (rng.Pick(3)) {
    case 0:
      out += "\"" + value + "\"";
      break;
    case 1:
      out += "'" + value + "'";
      break;
    default:
      // Unquoted only works for space-free values; all ours are.
      out += value;
      break;
  }
  return out;
}

std::string UsernameInput(Rng& rng, const std::string& name) {
  switch (rng.Pick(3)) {
    case 0:
      return "<input " + Attr(rng, "type", "text") + " " + Attr(rng, "name", name) +
             ">\n";
    case 1:
      return "<input " + Attr(rng, "type", "email") + " " +
             Attr(rng, "name", name) + ">\n";
    default:
      return "<input " + Attr(rng, "name", name) + ">\n";
  }
}

std::string PasswordInput(Rng& rng, const std::string& name, bool off) {
  std::string type = rng.Choose<std::string>({"password", "PASSWORD", "Password"});
  std::string out = "<input " + Attr(rng, "type", type) + " " +
                    Attr(rng, "name", name);
  if (off) {
    out += " " + Attr(rng, "autocomplete",
                      rng.Choose<std::string>({"off", "OFF", "Off"}));
  }
  return out + ">\n";
}

enum class OffPlacement { kNone, kFormTag, kPasswordInput };

// A complete login form. |action| empty means the attribute is omitted so
// the action falls back to the page URL.
std::string LoginFormMarkup(Rng& rng, const std::string& action,
                            OffPlacement off) {
  std::string username = rng.Choose<std::string>({"username", "user", "email", "login"});
  std::string password = rng.Choose<std::string>({"password", "pass", "pwd"});

  std::string tag = rng.Chance(50) ? "form" : "FORM";
  std::string open = "<" + tag + " " + Attr(rng, "method", "post");
  if (!action.empty()) open += " " + Attr(rng, "action", action);
  if (off == OffPlacement::kFormTag) {
    open += " " + Attr(rng, "autocomplete",
                       rng.Choose<std::string>({"off", "OFF", "Off"}));
  }
  open += ">\n";

  std::string body;
  if (rng.Chance(30)) {
    body += "<input " + Attr(rng, "type", "hidden") + " " +
            Attr(rng, "name", "csrf") + " " + Attr(rng, "value", "tok123") +
            ">\n";
  }
  body += UsernameInput(rng, username);
  body += PasswordInput(rng, password, off == OffPlacement::kPasswordInput);
  body += "<input " + Attr(rng, "type", "submit") + " " +
          Attr(rng, "value", "Sign-in") + ">\n";
  return open + body + "</" + tag + ">\n";
}

std::string DecoySearchForm(Rng& rng) {
  return "<form " + Attr(rng, "action", "/search") + ">\n<input " +
         Attr(rng, "type", "text") + " " + Attr(rng, "name", "q") +
         ">\n</form>\n";
}

std::string CommentedOutForm() {
  return "<!-- legacy login, do not re-enable\n<form action=http://old.test/login>\n"
         "<input type=password name=oldpw>\n</form>\n-->\n";
}

std::string HarmlessScript(Rng& rng) {
  return rng.Choose<std::string>(
      {"<script>var ready = true; console.log('boot');</script>\n",
       "<script type=\"text/javascript\">function focusFirst() { return 1; "
       "}</script>\n",
       "<script>window.onload = function() { tick(); };</script>\n"});
}

std::string DynamicFormScript(Rng& rng, const std::string& host) {
  switch (rng.Pick(3)) {
    case 0:
      return "<script>var f = document.createElement('form');\n"
             "f.action = 'http://" + host + "/login';\ndocument.body.appendChild(f);"
             "</script>\n";
    case 1:
      return "<script>document.write(\"<form action='/login'>"
             "<input type='password' name='pw'></form>\");</script>\n";
    default:
      return "<script>document.getElementById('slot').innerHTML = "
             "\"<form action='/login'><input type='password' name='pw'>"
             "</form>\";</script>\n";
  }
}

std::string PageShell(Rng& rng, const std::string& host, std::string body) {
  std::string head = rng.Chance(50)
                         ? "<!DOCTYPE html>\n<html>\n<head><title>" + host +
                               "</title></head>\n<body>\n"
                         : "<html><HEAD><TITLE>Welcome to " + host +
                               "</TITLE></HEAD><BODY>\n";
  std::string tail = rng.Chance(50) ? "</body>\n</html>\n" : "</BODY></HTML>\n";
  return head + std::move(body) + tail;
}

// Noise placed around the login form that must never change the verdict.
std::string LeadingNoise(Rng& rng, const std::string& host) {
  std::string out = "<h1>" + host + "</h1>\n";
  if (rng.Chance(40)) out += CommentedOutForm();
  if (rng.Chance(40)) out += DecoySearchForm(rng);
  if (rng.Chance(40)) out += HarmlessScript(rng);
  if (rng.Chance(30)) {
    out += "<a href=\"https://cdn." + host + "/static/app.js\">assets</a>\n";
  }
  return out;
}

GeneratedSite MakeVulnerableHttpPost(Rng& rng, int index) {
  std::string host = HostFor(index);
  std::string page_path = rng.Choose<std::string>({"/", "/login", "/account/signin.php"});
  std::string action;
  switch (rng.Pick(5)) {
    case 0:
      action = "http://" + host + "/auth/login";
      break;
    case 1:
      action = "login.php";  // directory relative, inherits http
      break;
    case 2:
      action = "/do-login";
      break;
    case 3:
      action = "//" + host + "/session";  // scheme relative, inherits http
      break;
    default:
      action = "";  // omitted, posts back to the page
      break;
  }
  GeneratedSite site;
  site.url = "http://" + host + page_path;
  site.html = PageShell(rng, host,
                        LeadingNoise(rng, host) +
                            LoginFormMarkup(rng, action, OffPlacement::kNone));
  site.label = "vulnerable_http_post";
  return site;
}

GeneratedSite MakeVulnerableHttpsPost(Rng& rng, int index) {
  std::string host = HostFor(index);
  std::string action = rng.Chance(50) ? "https://" + host + "/login"
                                      : "https://secure." + host + "/session";
  GeneratedSite site;
  site.url = "http://" + host + "/";
  site.html = PageShell(rng, host,
                        LeadingNoise(rng, host) +
                            LoginFormMarkup(rng, action, OffPlacement::kNone));
  site.label = "vulnerable_https_post";
  return site;
}

GeneratedSite MakeNotVulnerable(Rng& rng, int index, int subtype) {
  std::string host = HostFor(index);
  GeneratedSite site;
  site.label = "not_vulnerable";
  switch (subtype) {
    case 0: {  // served over https; form markup is irrelevant
      std::string action =
          rng.Chance(50) ? "https://" + host + "/login" : "/login";
      site.url = "https://" + host + "/";
      site.html = PageShell(rng, host,
                            LeadingNoise(rng, host) +
                                LoginFormMarkup(rng, action, OffPlacement::kNone));
      break;
    }
    case 1: {  // no login form at all
      site.url = "http://" + host + "/";
      site.html =
          PageShell(rng, host,
                    LeadingNoise(rng, host) + "<p>Brochure content only.</p>\n");
      break;
    }
    case 2: {  // autocomplete=off on the form tag or the password input
      OffPlacement off =
          rng.Chance(50) ? OffPlacement::kFormTag : OffPlacement::kPasswordInput;
      std::string action =
          rng.Chance(50) ? "https://" + host + "/login" : "/login";
      site.url = "http://" + host + "/";
      site.html = PageShell(
          rng, host, LeadingNoise(rng, host) + LoginFormMarkup(rng, action, off));
      break;
    }
    default: {  // form built by script; nothing static to audit
      site.url = "http://" + host + "/";
      site.html = PageShell(rng, host,
                            LeadingNoise(rng, host) + "<div id=\"slot\"></div>\n" +
                                DynamicFormScript(rng, host));
      break;
    }
  }
  return site;
}

}  // namespace

std::vector<GeneratedSite> GenerateCorpus(int total, uint64_t seed) {
  Rng rng(seed);
  const int vulnerable_http = total * 25 / 100;
  const int vulnerable_https = total * 3 / 100;
  const int not_vulnerable = total - vulnerable_http - vulnerable_https;

  std::vector<GeneratedSite> sites;
  sites.reserve(total);
  int index = 1;
  for (int i = 0; i < vulnerable_http; ++i) {
    sites.push_back(MakeVulnerableHttpPost(rng, index++));
  }
  for (int i = 0; i < vulnerable_https; ++i) {
    sites.push_back(MakeVulnerableHttpsPost(rng, index++));
  }
  for (int i = 0; i < not_vulnerable; ++i) {
    sites.push_back(MakeNotVulnerable(rng, index++, i % 4));
  }

  // Fisher-Yates so the labels are not grouped in manifest order.
  for (size_t i = sites.size(); i > 1; --i) {
    size_t j = rng.Pick(i);
    std::swap(sites[i - 1], sites[j]);
  }
  return sites;
}

bool WriteCorpus(const std::vector<GeneratedSite>& sites,
                 const std::string& directory, std::string* error) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    if (error) *error = "cannot create " + directory + ": " + ec.message();
    return false;
  }
  std::string manifest;
  for (size_t i = 0; i < sites.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "page%05zu.html", i + 1);
    fs::path html_path = fs::path(directory) / name;
    std::ofstream out(html_path, std::ios::binary);
    out << sites[i].html;
    if (!out) {
      if (error) *error = "cannot write " + html_path.string();
      return false;
    }
    manifest += sites[i].url + "\t" + name + "\t" + sites[i].label + "\n";
  }
  fs::path manifest_path = fs::path(directory) / "manifest.tsv";
  std::ofstream out(manifest_path, std::ios::binary);
  out << manifest;
  if (!out) {
    if (error) *error = "cannot write " + manifest_path.string();
    return false;
  }
  return true;
}

}  // namespace lupin
