#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    std::string cmd = std::string(CADMIN_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::string out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe))
        out.append(buf, n);
    int st = pclose(pipe);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("gallery commands") {
    Run r = run("gallery trousers-C --minimize");
    CHECK(r.status == 0);
    CHECK(contains(r.out, "fixed point"));
    CHECK(contains(r.out, "leaves: 9"));

    r = run("gallery disk-Cpp --explore --dot-poset disk.dot");
    CHECK(r.status == 0);
    CHECK(contains(r.out, "minimal elements: 1"));
    std::string dot = slurp("disk.dot");
    CHECK(contains(dot, "digraph"));
    CHECK(contains(dot, "13 cells\", peripheries=2"));

    r = run("gallery trousers-Cbar --confluence");
    CHECK(r.status == 1);
    CHECK(contains(r.out, "confluent: false"));

    for (const char* name : {"disk-Cpp", "trousers-Cbar", "U-Cbar"}) {
        r = run(std::string("--mode sampled gallery ") + name + " --validate");
        CHECK_MESSAGE(r.status == 0, r.out);
    }
    CHECK(run("gallery --list").status == 0);
    CHECK(run("gallery nonesuch").status == 2);
}

TEST_CASE("document commands") {
    REQUIRE(run("gallery trousers-Cbar --export --json cbar.json").status == 0);
    Run r = run("confluence cbar.json --json report.json");
    CHECK(r.status == 1);
    CHECK(contains(r.out, "confluent: false"));
    CHECK(contains(slurp("report.json"), "\"confluent\": false"));

    r = run("validate cbar.json");
    CHECK(r.status == 0);
    CHECK(contains(r.out, "27 leaves"));

    r = run("minimize cbar.json --json min.json");
    CHECK(r.status == 0);
    CHECK(contains(slurp("min.json"), "\"n\": 3"));

    CHECK(run("explore cbar.json --json a.json").status == 0);
    CHECK(run("explore cbar.json --json b.json").status == 0);
    CHECK(slurp("a.json") == slurp("b.json"));

    r = run("dot-tree cbar.json");
    CHECK(r.status == 0);
    CHECK(contains(r.out, "digraph tree"));
    CHECK(run("dot-poset cbar.json --dot p.dot").status == 0);
    CHECK(contains(slurp("p.dot"), "digraph poset"));

    r = run("cad1d --set \"(lt (pow x1 2) 2)\"");
    CHECK(r.status == 0);
    CHECK(contains(r.out, "(root (poly -2 0 1)"));
}

TEST_CASE("exit codes for bad input") {
    CHECK(run("").status == 2);
    CHECK(run("frobnicate").status == 2);
    CHECK(run("validate").status == 2);
    CHECK(run("validate does-not-exist.json").status == 2);
    CHECK(run("--mode fuzzy gallery chain").status == 2);
    CHECK(run("--precision -1 gallery chain").status == 2);
    CHECK(run("--samples 0 gallery chain").status == 2);
    {
        std::ofstream("broken.json") << "{\"n\": 1, \"stacks\": {\"\": {\"u\": 1, \"xi\": [\"0\", \"1\"]}}}";
    }
    CHECK(run("validate broken.json").status == 1);
    {
        std::ofstream("garbled.json") << "{\"n\": ";
    }
    CHECK(run("validate garbled.json").status == 2);
    CHECK(run("cad1d --set \"(lt x1\"").status == 2);
}
