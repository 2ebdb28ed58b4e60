#pragma once

#include <cmath>
#include <cstdio>
#include <string>

// Shared check machinery for the hand-rolled test binaries: non-fatal
// checks with a failure counter and a one-line summary per suite.

namespace testutil {

inline int checks = 0;
inline int failures = 0;

inline void fail(const char* file, int line, const std::string& msg) {
    ++failures;
    std::printf("[FAIL] %s:%d  %s\n", file, line, msg.c_str());
}

inline int summary(const char* suite) {
    if (failures == 0) {
        std::printf("[PASS] %s (%d checks)\n", suite, checks);
        return 0;
    }
    std::printf("[FAIL] %s: %d of %d checks failed\n", suite, failures, checks);
    return 1;
}

} // namespace testutil

#define CHECK(cond)                                                    \
    do {                                                               \
        ++testutil::checks;                                            \
        if (!(cond)) testutil::fail(__FILE__, __LINE__, #cond);        \
    } while (0)

#define CHECK_MSG(cond, msg)                                           \
    do {                                                               \
        ++testutil::checks;                                            \
        if (!(cond))                                                   \
            testutil::fail(__FILE__, __LINE__,                         \
                           std::string(#cond) + "  [" + (msg) + "]");  \
    } while (0)

#define CHECK_NEAR(a, b, tol)                                                 \
    do {                                                                      \
        ++testutil::checks;                                                   \
        const double va = (a), vb = (b), vtol = (tol);                        \
        if (!(std::abs(va - vb) <= vtol))                                     \
            testutil::fail(__FILE__, __LINE__,                                \
                           std::string(#a) + " = " + std::to_string(va) +     \
                               " vs " + std::to_string(vb) + " (tol " +       \
                               std::to_string(vtol) + ")");                   \
    } while (0)

#define CHECK_THROWS(expr)                                             \
    do {                                                               \
        ++testutil::checks;                                            \
        bool thrown = false;                                           \
        try {                                                          \
            (void)(expr);                                              \
        } catch (const std::exception&) {                              \
            thrown = true;                                             \
        }                                                              \
        if (!thrown) testutil::fail(__FILE__, __LINE__,                \
                                    std::string(#expr) + " did not throw"); \
    } while (0)
