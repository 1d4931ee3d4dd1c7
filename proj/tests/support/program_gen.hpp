#pragma once

#include <random>
#include <string>

namespace cogref::testing {

/// Random structured Python functions: if/elif/else, while/for (with else),
/// try/except/else/finally, with, break/continue/return. Control nesting
/// never exceeds max_depth.
class ProgramGenerator {
public:
    explicit ProgramGenerator(std::uint64_t seed, int max_depth = 4) : rng_(seed), max_depth_(max_depth) {}

    std::string function(const std::string &name) {
        std::string out = "def " + name + "(x, y):\n";
        block(out, 1, 0, false);
        return out;
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(int percent) { return pick(1, 100) <= percent; }

    static std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 4, ' '); }

    std::string cond() {
        static const char *kConds[] = {"x > 0", "y < x", "x % 3 == 0", "not y", "x in (1, 2)", "y is None"};
        return kConds[pick(0, 5)];
    }

    void simple(std::string &out, int indent) {
        static const char *kStmts[] = {"x = x + 1", "y = x * 2", "print(x)", "y = [i for i in range(x)]",
                                       "x, y = y, x", "pass"};
        out += pad(indent) + kStmts[pick(0, 5)] + "\n";
    }

    void block(std::string &out, int indent, int depth, bool in_loop) {
        const int n = pick(1, 3);
        for (int i = 0; i < n; ++i) {
            if (depth < max_depth_ && chance(55))
                compound(out, indent, depth, in_loop);
            else
                simple(out, indent);
        }
        if (chance(15)) {
            if (in_loop && chance(60))
                out += pad(indent) + (chance(50) ? "break\n" : "continue\n");
            else
                out += pad(indent) + "return x\n";
        }
    }

    void compound(std::string &out, int indent, int depth, bool in_loop) {
        switch (pick(0, 4)) {
            case 0: {
                out += pad(indent) + "if " + cond() + ":\n";
                block(out, indent + 1, depth + 1, in_loop);
                for (int k = pick(0, 2); k > 0; --k) {
                    out += pad(indent) + "elif " + cond() + ":\n";
                    block(out, indent + 1, depth + 1, in_loop);
                }
                if (chance(50)) {
                    out += pad(indent) + "else:\n";
                    block(out, indent + 1, depth + 1, in_loop);
                }
                break;
            }
            case 1:
                out += pad(indent) + "while " + cond() + ":\n";
                block(out, indent + 1, depth + 1, true);
                loop_else(out, indent, depth, in_loop);
                break;
            case 2:
                out += pad(indent) + "for i in range(x):\n";
                block(out, indent + 1, depth + 1, true);
                loop_else(out, indent, depth, in_loop);
                break;
            case 3: {
                out += pad(indent) + "try:\n";
                block(out, indent + 1, depth, in_loop);
                for (int k = pick(1, 2); k > 0; --k) {
                    out += pad(indent) + (k == 1 ? "except Exception:\n" : "except ValueError as e:\n");
                    block(out, indent + 1, depth + 1, in_loop);
                }
                if (chance(30)) {
                    out += pad(indent) + "else:\n";
                    block(out, indent + 1, depth, in_loop);
                }
                if (chance(30)) {
                    out += pad(indent) + "finally:\n";
                    simple(out, indent + 1);
                }
                break;
            }
            default:
                out += pad(indent) + "with open('f') as fh:\n";
                block(out, indent + 1, depth, in_loop);
                break;
        }
    }

    void loop_else(std::string &out, int indent, int depth, bool in_loop) {
        if (chance(25)) {
            out += pad(indent) + "else:\n";
            block(out, indent + 1, depth + 1, in_loop);
        }
    }

    std::mt19937_64 rng_;
    int max_depth_;
};

}  // namespace cogref::testing
