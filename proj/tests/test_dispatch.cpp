// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "oif/dispatch.hpp"
#include "oif/ivp.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using oif::Dispatch;
using oif::ImplManifest;
using oif::PackedArgs;
using oif::Status;

namespace {

class FakeState final : public oif::ImplState {};

class FakeBridge final : public oif::Bridge {
  public:
    std::unique_ptr<oif::ImplState> load(const ImplManifest&) override {
        return std::make_unique<FakeState>();
    }
    Status call(oif::ImplState&, std::string_view, const PackedArgs&, const PackedArgs&) override {
        return Status::ok();
    }
    Status unload(oif::ImplState&) override { return Status::ok(); }
};

std::vector<std::string> names(const std::vector<ImplManifest>& ms) {
    std::vector<std::string> out;
    for (const auto& m : ms) out.push_back(m.impl_name);
    return out;
}

void write_file(const fs::path& file, const std::string& text) {
    fs::create_directories(file.parent_path());
    std::ofstream(file) << text;
}

}  // namespace

TEST_CASE("manifest parsing") {
    const fs::path dir = oif::test::scratch_dir("manifest");

    SUBCASE("comments and blank lines are ignored") {
        const fs::path f = dir / "ivp" / "demo" / "demo.oifm";
        write_file(f, "# a demo\nplugin\n\nversion 2 3\n  libdemo.so  \n# prefix\nfoo\n");
        const ImplManifest m = oif::parse_manifest(f, "ivp");
        CHECK(m.interface_name == "ivp");
        CHECK(m.impl_name == "demo");
        CHECK(m.bridge_kind == "plugin");
        CHECK(m.version_major == 2);
        CHECK(m.version_minor == 3);
        CHECK(m.details == std::vector<std::string>{"libdemo.so", "foo"});
        CHECK(m.directory == f.parent_path());
    }
    SUBCASE("malformed version line") {
        const fs::path f = dir / "bad.oifm";
        write_file(f, "plugin\nversion 1\n");
        CHECK_THROWS_AS(oif::parse_manifest(f, "ivp"), oif::Error);
        write_file(f, "plugin\nversion 1 0 extra\n");
        CHECK_THROWS_AS(oif::parse_manifest(f, "ivp"), oif::Error);
        write_file(f, "plugin\n");
        CHECK_THROWS_AS(oif::parse_manifest(f, "ivp"), oif::Error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(oif::parse_manifest(dir / "absent.oifm", "ivp"), oif::Error);
    }
}

TEST_CASE("search path splitting") {
    CHECK(oif::split_search_path("") .empty());
    CHECK(oif::split_search_path("/a:/b") == std::vector<fs::path>{"/a", "/b"});
    CHECK(oif::split_search_path(":/a::/b:") == std::vector<fs::path>{"/a", "/b"});
}

TEST_CASE("search roots come from OIF_IMPL_PATH") {
    const char* saved = std::getenv("OIF_IMPL_PATH");
    const std::string saved_value = saved ? saved : "";
    ::setenv("OIF_IMPL_PATH", "/x/one:/x/two", 1);
    {
        Dispatch d;
        CHECK(d.search_roots() == std::vector<fs::path>{"/x/one", "/x/two"});
    }
    ::unsetenv("OIF_IMPL_PATH");
    {
        Dispatch d;
        CHECK(d.search_roots() == std::vector<fs::path>{OIF_TEST_BUNDLED_ROOT});
    }
    if (saved) ::setenv("OIF_IMPL_PATH", saved_value.c_str(), 1);
}

TEST_CASE("discover") {
    Dispatch d;

    SUBCASE("bundled install lists dopri5c and rk4") {
        d.set_search_roots({OIF_TEST_BUNDLED_ROOT});
        const auto r = d.discover("ivp");
        CHECK(names(r.manifests) == std::vector<std::string>{"dopri5c", "rk4"});
        CHECK(r.diagnostics.empty());
    }
    SUBCASE("empty root gives an empty list") {
        d.set_search_roots({oif::test::scratch_dir("empty_root")});
        const auto r = d.discover("ivp");
        CHECK(r.manifests.empty());
        CHECK(r.diagnostics.empty());
    }
    SUBCASE("malformed file is skipped with one diagnostic") {
        d.set_search_roots({OIF_TEST_BAD_ROOT});
        const auto r = d.discover("ivp");
        CHECK(r.manifests.empty());
        REQUIRE(r.diagnostics.size() == 1);
        CHECK(r.diagnostics[0].find("broken.oifm") != std::string::npos);
    }
    SUBCASE("order follows the roots, then the path within a root") {
        d.set_search_roots({OIF_TEST_FIXTURE_ROOT, OIF_TEST_BAD_ROOT, OIF_TEST_BUNDLED_ROOT});
        const auto a = d.discover("ivp");
        const auto b = d.discover("ivp");
        CHECK(names(a.manifests) == names(b.manifests));
        REQUIRE(a.manifests.size() > 4);
        const auto split = a.manifests.end() - 2;
        CHECK(names({split, a.manifests.end()}) == std::vector<std::string>{"dopri5c", "rk4"});
        std::vector<fs::path> paths;
        for (auto it = a.manifests.begin(); it != split; ++it) paths.push_back(it->directory);
        CHECK(std::is_sorted(paths.begin(), paths.end()));
    }
    SUBCASE("an earlier root shadows a later one") {
        const auto root = oif::test::scratch_dir("shadow_root");
        fs::create_directories(root / "ivp" / "rk4");
        std::ofstream(root / "ivp" / "rk4" / "rk4.oifm")
            << "plugin\nversion 1 0\n" << OIF_TEST_ECHO_LIB << "\noif_ivp\n";
        d.set_search_roots({root, OIF_TEST_BUNDLED_ROOT});
        ImplHandle h = d.init_impl("ivp", "rk4", 1, 0);
        // The echo fixture accepts a "fail" integrator; rk4 does not.
        std::string name = "fail";
        oif::ConfigDict empty;
        oif::EncodedConfigDict wire(empty);
        oif::PackedArgs in;
        in.push(name.c_str());
        in.push(wire.raw());
        CHECK(d.call_impl(h, "set_integrator", in, {}).is_ok());
        CHECK(d.unload_impl(h).is_ok());
    }
    SUBCASE("unknown interface") {
        d.set_search_roots({OIF_TEST_BUNDLED_ROOT});
        CHECK(d.discover("qeq").manifests.empty());
    }
}

TEST_CASE("init, call and unload") {
    Dispatch& d = Dispatch::instance();
    d.set_search_roots({OIF_TEST_FIXTURE_ROOT, OIF_TEST_BUNDLED_ROOT});

    SUBCASE("init returns a usable handle") {
        const ImplHandle h = d.init_impl("ivp", "dopri5c", 1, 0);
        CHECK(h >= 0);
        REQUIRE(d.manifest(h) != nullptr);
        CHECK(d.manifest(h)->impl_name == "dopri5c");
        CHECK(d.manifest(h)->version_major == 1);
        CHECK(d.manifest(h)->version_minor == 0);
        CHECK(d.unload_impl(h).is_ok());
        CHECK(d.manifest(h) == nullptr);
    }
    SUBCASE("unknown implementation is not found") {
        try {
            d.init_impl("ivp", "nonexistent", 1, 0);
            FAIL("expected not-found");
        } catch (const oif::Error& e) {
            CHECK(e.code() == OIF_ERR_NOT_FOUND);
        }
    }
    SUBCASE("version numbers are not matched") {
        const ImplHandle h = d.init_impl("ivp", "rk4", 7, 9);
        CHECK(d.manifest(h)->version_major == 7);
        CHECK(d.unload_impl(h).is_ok());
    }
    SUBCASE("bridge kind without a factory is a plugin failure") {
        try {
            d.init_impl("ivp", "nobridge", 1, 0);
            FAIL("expected plugin failure");
        } catch (const oif::Error& e) {
            CHECK(e.code() == OIF_ERR_PLUGIN);
        }
    }
    SUBCASE("integrate through call_impl") {
        const ImplHandle h = d.init_impl("ivp", "dopri5c", 1, 0);
        double y0[1] = {1.0};
        oif::ArrayView y0_view(y0, std::vector<std::intptr_t>{1});
        REQUIRE(oif::ivp::set_initial_value(h, y0_view.raw(), 0.0).is_ok());
        OIFCallback cb{OIF_LANG_NATIVE, nullptr, &oif::test::decay_rhs, nullptr};
        REQUIRE(oif::ivp::set_rhs_fn(h, &cb).is_ok());

        double y[1] = {0.0};
        oif::ArrayView y_view(y, std::vector<std::intptr_t>{1});
        double t = 0.1;
        PackedArgs in;
        in.push(&t);
        PackedArgs out;
        out.push(y_view.raw());
        const Status s = d.call_impl(h, "integrate", in, out);
        CHECK(s.is_ok());
        CHECK(y[0] == doctest::Approx(std::exp(-0.1)).epsilon(1e-6));
        CHECK(d.unload_impl(h).is_ok());
    }
    SUBCASE("dead handle and double unload") {
        const ImplHandle h = d.init_impl("ivp", "rk4", 1, 0);
        CHECK(d.unload_impl(h).is_ok());
        double t = 1.0;
        PackedArgs in;
        in.push(&t);
        CHECK(d.call_impl(h, "integrate", in, {}).code() == OIF_ERR_NOT_FOUND);
        CHECK(d.unload_impl(h).code() == OIF_ERR_NOT_FOUND);
        CHECK(d.unload_impl(123456).code() == OIF_ERR_NOT_FOUND);
    }
    SUBCASE("unknown method is a plugin failure") {
        const ImplHandle h = d.init_impl("ivp", "rk4", 1, 0);
        CHECK(d.call_impl(h, "intgrate", {}, {}).code() == OIF_ERR_PLUGIN);
        CHECK(d.unload_impl(h).is_ok());
    }
    SUBCASE("two implementations are independent") {
        const ImplHandle a = d.init_impl("ivp", "dopri5c", 1, 0);
        const ImplHandle b = d.init_impl("ivp", "rk4", 1, 0);
        CHECK(a != b);
        CHECK(d.unload_impl(a).is_ok());

        double y0[1] = {1.0};
        oif::ArrayView y0_view(y0, std::vector<std::intptr_t>{1});
        CHECK(oif::ivp::set_initial_value(b, y0_view.raw(), 0.0).is_ok());
        OIFCallback cb{OIF_LANG_NATIVE, nullptr, &oif::test::decay_rhs, nullptr};
        CHECK(oif::ivp::set_rhs_fn(b, &cb).is_ok());
        double y[1] = {0.0};
        oif::ArrayView y_view(y, std::vector<std::intptr_t>{1});
        CHECK(oif::ivp::integrate(b, 0.5, y_view.raw()).is_ok());
        CHECK(y[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
        CHECK(d.unload_impl(b).is_ok());
    }
}

TEST_CASE("handles stay unique over init and unload sequences") {
    Dispatch& d = Dispatch::instance();
    d.set_search_roots({OIF_TEST_FIXTURE_ROOT, OIF_TEST_BUNDLED_ROOT});
    const std::size_t live_before = d.live_count();

    std::vector<ImplHandle> live;
    std::set<ImplHandle> ever;
    const char* impls[] = {"dopri5c", "rk4", "echo"};
    unsigned state = 12345;
    for (int step = 0; step < 60; ++step) {
        state = state * 1103515245u + 12345u;
        if (live.empty() || (state >> 16) % 3 != 0) {
            const ImplHandle h = d.init_impl("ivp", impls[(state >> 8) % 3], 1, 0);
            CHECK(ever.insert(h).second);
            live.push_back(h);
        } else {
            const std::size_t k = (state >> 4) % live.size();
            CHECK(d.unload_impl(live[k]).is_ok());
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
        }
        const std::set<ImplHandle> distinct(live.begin(), live.end());
        CHECK(distinct.size() == live.size());
        CHECK(d.live_count() == live_before + live.size());
    }
    for (auto h : live) CHECK(d.unload_impl(h).is_ok());
    CHECK(d.live_count() == live_before);
}

TEST_CASE("one bridge per kind") {
    Dispatch d;
    d.set_search_roots({OIF_TEST_FIXTURE_ROOT});
    d.register_bridge("fake", [] { return std::make_unique<FakeBridge>(); });
    CHECK(d.bridge_instantiations("fake") == 0);

    const auto a = d.init_impl("ivp", "fake_a", 1, 0);
    const auto b = d.init_impl("ivp", "fake_b", 1, 0);
    CHECK(d.bridge_instantiations("fake") == 1);
    CHECK(d.unload_impl(a).is_ok());
    CHECK(d.unload_impl(b).is_ok());

    // The bridge outlives the implementations it loaded.
    const auto c = d.init_impl("ivp", "fake_a", 1, 0);
    CHECK(d.bridge_instantiations("fake") == 1);
    CHECK(d.call_impl(c, "anything", {}, {}).is_ok());
    CHECK(d.unload_impl(c).is_ok());

    const auto p = d.init_impl("ivp", "echo", 1, 0);
    const auto q = d.init_impl("ivp", "echo", 1, 0);
    CHECK(d.bridge_instantiations("plugin") == 1);
    CHECK(d.unload_impl(p).is_ok());
    CHECK(d.unload_impl(q).is_ok());
}

TEST_CASE("implementations left loaded are released with the registry") {
    Dispatch d;
    d.set_search_roots({OIF_TEST_BUNDLED_ROOT});
    d.init_impl("ivp", "dopri5c", 1, 0);
    d.init_impl("ivp", "rk4", 1, 0);
    CHECK(d.live_count() == 2);
}
