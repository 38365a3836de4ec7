// Copyright 2026 The SympGNN Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file planetoid.hpp
 * @brief One-time converter for the public Planetoid citation files
 *        (ind.<name>.{x,tx,allx,y,ty,ally,graph,test.index}) into the dataset
 *        JSON schema. The binary files are Python pickles of scipy CSR
 *        matrices, numpy arrays and a defaultdict; a small pickle VM below
 *        reads exactly that object family (protocols 0-5, both the python 2
 *        raw-string and python 3 byte encodings).
 */

#pragma once

#include <cstring>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sympgnn/dataset.hpp"

namespace sympgnn {
namespace pickle {

struct Value;
using ValuePtr = std::shared_ptr<Value>;

struct Value {
    enum class Kind {
        none,
        boolean,
        integer,
        real,
        bytes,
        text,
        list,
        tuple,
        dict,
        global,
        object,  // result of REDUCE / NEWOBJ / INST, possibly with BUILD state
        mark,
    };
    Kind kind = Kind::none;
    bool b = false;
    long long i = 0;
    double d = 0.0;
    std::string s;  // bytes payload or utf-8 text
    std::vector<ValuePtr> items;
    std::vector<std::pair<ValuePtr, ValuePtr>> map;  // dict entries, insertion order
    std::string module, name;                        // global
    ValuePtr callable, args, state;                  // object

    static ValuePtr make(Kind k) {
        auto v = std::make_shared<Value>();
        v->kind = k;
        return v;
    }
};

[[noreturn]] inline void bad(const std::string& msg) { fail("pickle: " + msg); }

inline std::string utf8_to_latin1(const std::string& in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size();) {
        const auto c = static_cast<unsigned char>(in[i]);
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
            i += 1;
        } else if ((c & 0xE0) == 0xC0 && i + 1 < in.size()) {
            const auto c2 = static_cast<unsigned char>(in[i + 1]);
            const unsigned cp = ((c & 0x1Fu) << 6) | (c2 & 0x3Fu);
            if (cp > 0xFF) bad("latin1 re-encode: code point out of range");
            out.push_back(static_cast<char>(cp));
            i += 2;
        } else {
            bad("latin1 re-encode: unexpected multi-byte sequence");
        }
    }
    return out;
}

/// Pickle virtual machine for the Planetoid object family.
class Reader {
public:
    explicit Reader(const std::string& data) : data_(data) {}

    ValuePtr parse() {
        while (true) {
            const unsigned char op = u8();
            switch (op) {
                case 0x80: u8(); break;                          // PROTO
                case 0x95: skip(8); break;                       // FRAME
                case '.': {                                      // STOP
                    require(!stack_.empty(), "pickle: empty stack at STOP");
                    return stack_.back();
                }
                case '(': stack_.push_back(Value::make(Value::Kind::mark)); break;
                case '0': pop(); break;                          // POP
                case '1': pop_to_mark(); break;                  // POP_MARK
                case '2': stack_.push_back(stack_.back()); break; // DUP
                case 'N': stack_.push_back(Value::make(Value::Kind::none)); break;
                case 0x88: push_bool(true); break;
                case 0x89: push_bool(false); break;
                case 'J': push_int(static_cast<std::int32_t>(u32())); break;
                case 'K': push_int(u8()); break;
                case 'M': push_int(u16()); break;
                case 'I': {  // INT, decimal line; "00"/"01" mean bool
                    const std::string line = read_line();
                    if (line == "00")
                        push_bool(false);
                    else if (line == "01")
                        push_bool(true);
                    else
                        push_int(std::stoll(line));
                    break;
                }
                case 'L': {  // LONG, decimal line with optional trailing L
                    std::string line = read_line();
                    if (!line.empty() && (line.back() == 'L' || line.back() == 'l'))
                        line.pop_back();
                    push_int(line.empty() ? 0 : std::stoll(line));
                    break;
                }
                case 0x8a: {  // LONG1
                    const std::size_t n = u8();
                    push_int(read_le_signed(n));
                    break;
                }
                case 'G': {  // BINFLOAT, big-endian double
                    std::uint64_t raw = 0;
                    for (int k = 0; k < 8; ++k) raw = (raw << 8) | u8();
                    double d = 0;
                    std::memcpy(&d, &raw, 8);
                    push_real(d);
                    break;
                }
                case 'F': push_real(std::stod(read_line())); break;
                case 'S': push_bytes(unescape_py_string(read_line())); break;  // STRING
                case 'T': push_bytes(read(u32())); break;                      // BINSTRING
                case 'U': push_bytes(read(u8())); break;   // SHORT_BINSTRING
                case 'B': push_bytes(read(u32())); break;  // BINBYTES
                case 'C': push_bytes(read(u8())); break;   // SHORT_BINBYTES
                case 0x8e: push_bytes(read(u64())); break; // BINBYTES8
                // unicode payloads are utf-8 on disk; they are re-encoded to
                // latin1 here so byte payloads smuggled through text survive
                case 'X': push_text(utf8_to_latin1(read(u32()))); break;   // BINUNICODE
                case 0x8c: push_text(utf8_to_latin1(read(u8()))); break;   // SHORT_BINUNICODE
                case 0x8d: push_text(utf8_to_latin1(read(u64()))); break;  // BINUNICODE8
                // raw-unicode-escape: high bytes appear literally
                case 'V': push_text(unescape_py_string(read_line())); break;  // UNICODE
                case ')': stack_.push_back(Value::make(Value::Kind::tuple)); break;
                case 't': {  // TUPLE
                    auto items = pop_to_mark();
                    auto v = Value::make(Value::Kind::tuple);
                    v->items = std::move(items);
                    stack_.push_back(std::move(v));
                    break;
                }
                case 0x85: make_tuple_n(1); break;
                case 0x86: make_tuple_n(2); break;
                case 0x87: make_tuple_n(3); break;
                case ']': stack_.push_back(Value::make(Value::Kind::list)); break;
                case 'l': {  // LIST
                    auto items = pop_to_mark();
                    auto v = Value::make(Value::Kind::list);
                    v->items = std::move(items);
                    stack_.push_back(std::move(v));
                    break;
                }
                case 'a': {  // APPEND
                    ValuePtr x = pop();
                    append_into(stack_.back(), {x});
                    break;
                }
                case 'e': {  // APPENDS
                    auto items = pop_to_mark();
                    append_into(stack_.back(), items);
                    break;
                }
                case '}': stack_.push_back(Value::make(Value::Kind::dict)); break;
                case 'd': {  // DICT
                    auto items = pop_to_mark();
                    auto v = Value::make(Value::Kind::dict);
                    require(items.size() % 2 == 0, "pickle: DICT needs key/value pairs");
                    for (std::size_t k = 0; k + 1 < items.size(); k += 2)
                        v->map.emplace_back(items[k], items[k + 1]);
                    stack_.push_back(std::move(v));
                    break;
                }
                case 's': {  // SETITEM
                    ValuePtr val = pop(), key = pop();
                    set_into(stack_.back(), key, val);
                    break;
                }
                case 'u': {  // SETITEMS
                    auto items = pop_to_mark();
                    require(items.size() % 2 == 0, "pickle: SETITEMS needs pairs");
                    for (std::size_t k = 0; k + 1 < items.size(); k += 2)
                        set_into(stack_.back(), items[k], items[k + 1]);
                    break;
                }
                case 'c': {  // GLOBAL
                    auto v = Value::make(Value::Kind::global);
                    v->module = read_line();
                    v->name = read_line();
                    stack_.push_back(std::move(v));
                    break;
                }
                case 0x93: {  // STACK_GLOBAL
                    ValuePtr name = pop(), module = pop();
                    auto v = Value::make(Value::Kind::global);
                    v->module = module->s;
                    v->name = name->s;
                    stack_.push_back(std::move(v));
                    break;
                }
                case 'R': {  // REDUCE
                    ValuePtr args = pop(), fn = pop();
                    stack_.push_back(reduce(fn, args));
                    break;
                }
                case 0x81: {  // NEWOBJ
                    ValuePtr args = pop(), cls = pop();
                    stack_.push_back(reduce(cls, args));
                    break;
                }
                case 0x92: {  // NEWOBJ_EX
                    pop();  // kwargs
                    ValuePtr args = pop(), cls = pop();
                    stack_.push_back(reduce(cls, args));
                    break;
                }
                case 'i': {  // INST (protocol 0 class instance)
                    auto g = Value::make(Value::Kind::global);
                    g->module = read_line();
                    g->name = read_line();
                    auto args = Value::make(Value::Kind::tuple);
                    args->items = pop_to_mark();
                    stack_.push_back(reduce(g, args));
                    break;
                }
                case 'o': {  // OBJ
                    auto items = pop_to_mark();
                    require(!items.empty(), "pickle: OBJ without class");
                    auto args = Value::make(Value::Kind::tuple);
                    args->items.assign(items.begin() + 1, items.end());
                    stack_.push_back(reduce(items.front(), args));
                    break;
                }
                case 'b': {  // BUILD
                    ValuePtr state = pop();
                    ValuePtr obj = stack_.back();
                    require(obj->kind == Value::Kind::object, "pickle: BUILD on non-object");
                    obj->state = std::move(state);
                    break;
                }
                case 'q': memo_put(u8()); break;
                case 'r': memo_put(u32()); break;
                case 0x94: memo_.push_back(stack_.back()); break;  // MEMOIZE
                case 'h': memo_get(u8()); break;
                case 'j': memo_get(u32()); break;
                case 'p': memo_put(static_cast<std::size_t>(std::stoull(read_line()))); break;
                case 'g': memo_get(static_cast<std::size_t>(std::stoull(read_line()))); break;
                default:
                    bad("unsupported opcode 0x" + std::to_string(static_cast<int>(op)) +
                        " at offset " + std::to_string(at_ - 1));
            }
        }
    }

private:
    ValuePtr reduce(ValuePtr fn, ValuePtr args) {
        if (fn->kind == Value::Kind::global && fn->module == "_codecs" && fn->name == "encode") {
            // bytes pickled by python 3 at protocol <= 2; text is latin1 here
            require(args->items.size() >= 1, "pickle: _codecs.encode without payload");
            const std::string enc =
                args->items.size() >= 2 ? args->items[1]->s : std::string("latin1");
            require(enc == "latin1" || enc == "latin-1", "pickle: unexpected codec " + enc);
            auto v = Value::make(Value::Kind::bytes);
            v->s = args->items[0]->s;
            return v;
        }
        if (fn->kind == Value::Kind::global &&
            (fn->module == "copy_reg" || fn->module == "copyreg") &&
            fn->name == "_reconstructor") {
            // _reconstructor(cls, base, state) -> plain instance of cls
            require(!args->items.empty(), "pickle: _reconstructor without class");
            auto v = Value::make(Value::Kind::object);
            v->callable = args->items[0];
            v->args = Value::make(Value::Kind::tuple);
            return v;
        }
        auto v = Value::make(Value::Kind::object);
        v->callable = std::move(fn);
        v->args = std::move(args);
        return v;
    }

    void append_into(ValuePtr& target, const std::vector<ValuePtr>& items) {
        if (target->kind == Value::Kind::list || target->kind == Value::Kind::object) {
            target->items.insert(target->items.end(), items.begin(), items.end());
            return;
        }
        bad("APPEND to non-list");
    }
    void set_into(ValuePtr& target, ValuePtr key, ValuePtr val) {
        if (target->kind == Value::Kind::dict || target->kind == Value::Kind::object) {
            target->map.emplace_back(std::move(key), std::move(val));
            return;
        }
        bad("SETITEM to non-dict");
    }

    void make_tuple_n(std::size_t n) {
        auto v = Value::make(Value::Kind::tuple);
        v->items.resize(n);
        for (std::size_t k = 0; k < n; ++k) v->items[n - 1 - k] = pop();
        stack_.push_back(std::move(v));
    }

    void push_bool(bool b) {
        auto v = Value::make(Value::Kind::boolean);
        v->b = b;
        stack_.push_back(std::move(v));
    }
    void push_int(long long i) {
        auto v = Value::make(Value::Kind::integer);
        v->i = i;
        stack_.push_back(std::move(v));
    }
    void push_real(double d) {
        auto v = Value::make(Value::Kind::real);
        v->d = d;
        stack_.push_back(std::move(v));
    }
    void push_bytes(std::string s) {
        auto v = Value::make(Value::Kind::bytes);
        v->s = std::move(s);
        stack_.push_back(std::move(v));
    }
    void push_text(std::string s) {
        auto v = Value::make(Value::Kind::text);
        v->s = std::move(s);
        stack_.push_back(std::move(v));
    }

    ValuePtr pop() {
        require(!stack_.empty(), "pickle: stack underflow");
        ValuePtr v = stack_.back();
        stack_.pop_back();
        return v;
    }
    std::vector<ValuePtr> pop_to_mark() {
        std::vector<ValuePtr> items;
        while (true) {
            require(!stack_.empty(), "pickle: missing MARK");
            ValuePtr v = pop();
            if (v->kind == Value::Kind::mark) break;
            items.push_back(std::move(v));
        }
        std::reverse(items.begin(), items.end());
        return items;
    }

    void memo_put(std::size_t slot) {
        if (memo_.size() <= slot) memo_.resize(slot + 1);
        memo_[slot] = stack_.back();
    }
    void memo_get(std::size_t slot) {
        require(slot < memo_.size() && memo_[slot], "pickle: memo miss");
        stack_.push_back(memo_[slot]);
    }

    unsigned char u8() {
        require(at_ < data_.size(), "pickle: truncated stream");
        return static_cast<unsigned char>(data_[at_++]);
    }
    std::uint32_t u16() {
        std::uint32_t v = u8();
        return v | (static_cast<std::uint32_t>(u8()) << 8);
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(u8()) << (8 * k);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(u8()) << (8 * k);
        return v;
    }
    long long read_le_signed(std::size_t n) {
        require(n <= 8, "pickle: LONG1 too wide");
        std::uint64_t v = 0;
        for (std::size_t k = 0; k < n; ++k) v |= static_cast<std::uint64_t>(u8()) << (8 * k);
        if (n > 0 && n < 8 && (v >> (8 * n - 1)) & 1u) v |= ~std::uint64_t(0) << (8 * n);
        return static_cast<long long>(v);
    }
    std::string read(std::size_t n) {
        require(at_ + n <= data_.size(), "pickle: truncated payload");
        std::string s = data_.substr(at_, n);
        at_ += n;
        return s;
    }
    std::string read_line() {
        std::string s;
        while (true) {
            const char c = static_cast<char>(u8());
            if (c == '\n') break;
            s.push_back(c);
        }
        return s;
    }
    void skip(std::size_t n) {
        require(at_ + n <= data_.size(), "pickle: truncated stream");
        at_ += n;
    }

    /// Protocol-0 quoted string with backslash escapes -> raw bytes.
    static std::string unescape_py_string(const std::string& line) {
        std::string s = line;
        if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front())
            s = s.substr(1, s.size() - 2);
        std::string out;
        for (std::size_t i = 0; i < s.size();) {
            if (s[i] != '\\') {
                out.push_back(s[i++]);
                continue;
            }
            require(i + 1 < s.size(), "pickle: dangling escape");
            const char c = s[i + 1];
            switch (c) {
                case 'n': out.push_back('\n'); i += 2; break;
                case 't': out.push_back('\t'); i += 2; break;
                case 'r': out.push_back('\r'); i += 2; break;
                case '\\': out.push_back('\\'); i += 2; break;
                case '\'': out.push_back('\''); i += 2; break;
                case '"': out.push_back('"'); i += 2; break;
                case 'x': {
                    require(i + 3 < s.size(), "pickle: bad \\x escape");
                    out.push_back(static_cast<char>(std::stoi(s.substr(i + 2, 2), nullptr, 16)));
                    i += 4;
                    break;
                }
                case 'u': {
                    require(i + 5 < s.size(), "pickle: bad \\u escape");
                    const int cp = std::stoi(s.substr(i + 2, 4), nullptr, 16);
                    require(cp <= 0xFF, "pickle: non-latin1 \\u escape");
                    out.push_back(static_cast<char>(cp));
                    i += 6;
                    break;
                }
                default: bad("unknown string escape");
            }
        }
        return out;
    }

    const std::string& data_;
    std::size_t at_ = 0;
    std::vector<ValuePtr> stack_;
    std::vector<ValuePtr> memo_;
};

// ---- materializers ---------------------------------------------------------------

struct NdArray {
    std::vector<std::size_t> shape;
    std::vector<double> values;  // every dtype widened to double

    std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
    std::size_t cols() const { return shape.size() > 1 ? shape[1] : 1; }
};

inline bool global_is(const ValuePtr& v, const std::string& name_suffix) {
    return v && v->kind == Value::Kind::global &&
           v->name.size() >= name_suffix.size() &&
           v->name.compare(v->name.size() - name_suffix.size(), name_suffix.size(),
                           name_suffix) == 0;
}

/// dtype descriptor like "f4" / "<i8" -> (type char, item size, big endian).
inline void parse_dtype(const ValuePtr& dt, char& type_ch, std::size_t& item, bool& big_endian) {
    require(dt && dt->kind == Value::Kind::object && global_is(dt->callable, "dtype"),
            "pickle: expected a numpy dtype object");
    require(dt->args && !dt->args->items.empty(), "pickle: dtype without descriptor");
    std::string descr = dt->args->items[0]->s;
    big_endian = false;
    if (!descr.empty() && (descr[0] == '<' || descr[0] == '|' || descr[0] == '=')) {
        descr.erase(0, 1);
    } else if (!descr.empty() && descr[0] == '>') {
        big_endian = true;
        descr.erase(0, 1);
    }
    if (dt->state && dt->state->kind == Value::Kind::tuple && dt->state->items.size() > 1 &&
        dt->state->items[1]->kind == Value::Kind::text && dt->state->items[1]->s == ">")
        big_endian = true;
    require(descr.size() >= 2, "pickle: unsupported dtype descriptor '" + descr + "'");
    type_ch = descr[0];
    item = static_cast<std::size_t>(std::stoul(descr.substr(1)));
}

inline NdArray materialize_ndarray(const ValuePtr& v) {
    require(v && v->kind == Value::Kind::object, "pickle: expected ndarray object");
    require(global_is(v->callable, "_reconstruct") || global_is(v->callable, "_frombuffer"),
            "pickle: unexpected ndarray constructor");
    NdArray out;
    ValuePtr shape, dtype;
    std::string raw;
    if (global_is(v->callable, "_reconstruct")) {
        require(v->state && v->state->kind == Value::Kind::tuple && v->state->items.size() >= 5,
                "pickle: ndarray state malformed");
        shape = v->state->items[1];
        dtype = v->state->items[2];
        require(!v->state->items[3]->b, "pickle: Fortran-order arrays not supported");
        require(v->state->items[4]->kind == Value::Kind::bytes,
                "pickle: ndarray data must be raw bytes");
        raw = v->state->items[4]->s;
    } else {  // _frombuffer(data, dtype, shape, order)
        const auto& a = v->args->items;
        require(a.size() >= 3, "pickle: _frombuffer args malformed");
        raw = a[0]->s;
        dtype = a[1];
        shape = a[2];
    }
    for (const auto& s : shape->items)
        out.shape.push_back(static_cast<std::size_t>(s->i));
    char tc = 0;
    std::size_t item = 0;
    bool be = false;
    parse_dtype(dtype, tc, item, be);
    require(item > 0 && raw.size() % item == 0, "pickle: ndarray byte length mismatch");
    const std::size_t count = raw.size() / item;
    std::size_t expect = 1;
    for (auto s : out.shape) expect *= s;
    require(out.shape.empty() ? count == 1 : count == expect,
            "pickle: ndarray element count mismatch");
    out.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        unsigned char buf[8] = {0};
        for (std::size_t b = 0; b < item; ++b)
            buf[b] = static_cast<unsigned char>(raw[k * item + (be ? item - 1 - b : b)]);
        double val = 0.0;
        if (tc == 'f' && item == 4) {
            float f;
            std::memcpy(&f, buf, 4);
            val = static_cast<double>(f);
        } else if (tc == 'f' && item == 8) {
            std::memcpy(&val, buf, 8);
        } else if (tc == 'i' || tc == 'u' || tc == 'b') {
            std::uint64_t u = 0;
            for (std::size_t b = 0; b < item; ++b) u |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
            if (tc == 'i' && item < 8 && (u >> (8 * item - 1)) & 1u)
                u |= ~std::uint64_t(0) << (8 * item);
            val = (tc == 'i') ? static_cast<double>(static_cast<std::int64_t>(u))
                              : static_cast<double>(u);
        } else {
            bad("unsupported dtype '" + std::string(1, tc) + std::to_string(item) + "'");
        }
        out.values[k] = val;
    }
    return out;
}

inline const ValuePtr* dict_find(const ValuePtr& d, const std::string& key) {
    for (const auto& [k, v] : d->map)
        if ((k->kind == Value::Kind::text || k->kind == Value::Kind::bytes) && k->s == key)
            return &v;
    return nullptr;
}

/// Dense matrix from a pickled scipy CSR (or a plain 2D ndarray).
inline Matrix materialize_matrix(const ValuePtr& v) {
    require(v && v->kind == Value::Kind::object, "pickle: expected matrix object");
    if (global_is(v->callable, "_reconstruct") || global_is(v->callable, "_frombuffer")) {
        NdArray a = materialize_ndarray(v);
        require(a.shape.size() <= 2, "pickle: matrix must be at most 2D");
        return Matrix(a.rows(), a.cols(), std::move(a.values));
    }
    require(global_is(v->callable, "csr_matrix"), "pickle: expected a scipy CSR matrix");
    ValuePtr state = v->state;
    require(state && (state->kind == Value::Kind::dict || !state->map.empty() ||
                      v->kind == Value::Kind::object),
            "pickle: CSR without state");
    // state is the object __dict__ (directly, or stored in map of the object)
    const ValuePtr& d = state->kind == Value::Kind::dict ? state : v;
    const ValuePtr* shape = dict_find(d, "_shape");
    if (!shape) shape = dict_find(d, "shape");
    const ValuePtr* data = dict_find(d, "data");
    const ValuePtr* indices = dict_find(d, "indices");
    const ValuePtr* indptr = dict_find(d, "indptr");
    require(shape && data && indices && indptr,
            "pickle: CSR state missing _shape/data/indices/indptr");
    const auto rows = static_cast<std::size_t>((*shape)->items.at(0)->i);
    const auto cols = static_cast<std::size_t>((*shape)->items.at(1)->i);
    NdArray dat = materialize_ndarray(*data);
    NdArray idx = materialize_ndarray(*indices);
    NdArray ptr = materialize_ndarray(*indptr);
    require(ptr.values.size() == rows + 1, "pickle: CSR indptr length mismatch");
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto lo = static_cast<std::size_t>(ptr.values[r]);
        const auto hi = static_cast<std::size_t>(ptr.values[r + 1]);
        require(hi <= dat.values.size() && hi <= idx.values.size() && lo <= hi,
                "pickle: CSR index range out of bounds");
        for (std::size_t k = lo; k < hi; ++k)
            m(r, static_cast<std::size_t>(idx.values[k])) = dat.values[k];
    }
    return m;
}

/// node -> neighbor list from a pickled (default)dict.
inline std::map<int, std::vector<int>> materialize_graph(const ValuePtr& v) {
    require(v != nullptr, "pickle: null graph");
    const bool plain_dict = v->kind == Value::Kind::dict;
    require(plain_dict || v->kind == Value::Kind::object,
            "pickle: graph must be a dict or defaultdict");
    std::map<int, std::vector<int>> g;
    for (const auto& [k, val] : v->map) {
        require(k->kind == Value::Kind::integer, "pickle: graph key must be int");
        std::vector<int> nbrs;
        require(val->kind == Value::Kind::list || val->kind == Value::Kind::tuple,
                "pickle: graph value must be a list");
        for (const auto& nb : val->items)
            nbrs.push_back(static_cast<int>(nb->i));
        g[static_cast<int>(k->i)] = std::move(nbrs);
    }
    return g;
}

}  // namespace pickle

// ---- planetoid -> NodeDataset ------------------------------------------------------

struct PlanetoidRaw {
    Matrix x, tx, allx;    // features (train / test / train+unlabeled)
    Matrix y, ty, ally;    // one-hot labels
    std::map<int, std::vector<int>> graph;
    std::vector<int> test_index;  // file order
};

inline Matrix load_pickled_matrix(const std::string& path) {
    const std::string blob = read_text_file(path);
    pickle::Reader r(blob);
    return pickle::materialize_matrix(r.parse());
}

inline PlanetoidRaw load_planetoid_raw(const std::string& dir, const std::string& name) {
    auto p = [&](const std::string& suffix) { return dir + "/ind." + name + "." + suffix; };
    for (const char* sfx : {"x", "tx", "allx", "y", "ty", "ally", "graph", "test.index"})
        require(file_exists(p(sfx)),
                "Planetoid layout: missing file " + p(sfx) +
                    " (expected ind.<name>.{x,tx,allx,y,ty,ally,graph,test.index})");
    PlanetoidRaw raw;
    raw.x = load_pickled_matrix(p("x"));
    raw.tx = load_pickled_matrix(p("tx"));
    raw.allx = load_pickled_matrix(p("allx"));
    raw.y = load_pickled_matrix(p("y"));
    raw.ty = load_pickled_matrix(p("ty"));
    raw.ally = load_pickled_matrix(p("ally"));
    {
        const std::string blob = read_text_file(p("graph"));
        pickle::Reader r(blob);
        raw.graph = pickle::materialize_graph(r.parse());
    }
    {
        std::istringstream in(read_text_file(p("test.index")));
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) raw.test_index.push_back(std::stoi(line));
    }
    return raw;
}

/// Standard Planetoid assembly: stack allx/tx, put test rows back at their
/// graph positions, first |y| nodes train, next 500 validation, the sorted
/// test indices test.
inline NodeDataset planetoid_to_dataset(const PlanetoidRaw& raw) {
    const std::size_t n = raw.allx.rows() + raw.tx.rows();
    const std::size_t m = raw.allx.cols();
    require(raw.tx.cols() == m, "planetoid: allx/tx width mismatch");
    require(raw.test_index.size() == raw.tx.rows(), "planetoid: test index count != tx rows");

    std::vector<int> sorted_idx = raw.test_index;
    std::sort(sorted_idx.begin(), sorted_idx.end());
    require(!sorted_idx.empty() && static_cast<std::size_t>(sorted_idx.back()) == n - 1,
            "planetoid: test indices do not span the tail of the graph");

    auto stack_rows = [&](const Matrix& a, const Matrix& b) {
        Matrix s(a.rows() + b.rows(), a.cols());
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = a(i, j);
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) s(a.rows() + i, j) = b(i, j);
        return s;
    };
    Matrix features = stack_rows(raw.allx, raw.tx);
    Matrix onehot = stack_rows(raw.ally, raw.ty);

    // undo the shuffled test order: row test_index[k] gets sorted row k
    {
        Matrix fcopy = features, lcopy = onehot;
        for (std::size_t k = 0; k < raw.test_index.size(); ++k) {
            const auto dst = static_cast<std::size_t>(raw.test_index[k]);
            const auto src = static_cast<std::size_t>(sorted_idx[k]);
            for (std::size_t j = 0; j < m; ++j) features(dst, j) = fcopy(src, j);
            for (std::size_t j = 0; j < onehot.cols(); ++j) onehot(dst, j) = lcopy(src, j);
        }
    }

    NodeDataset ds;
    ds.x = std::move(features);
    ds.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t arg = 0;
        double best = onehot(i, 0);
        double rowsum = onehot(i, 0);
        for (std::size_t j = 1; j < onehot.cols(); ++j) {
            rowsum += onehot(i, j);
            if (onehot(i, j) > best) {
                best = onehot(i, j);
                arg = j;
            }
        }
        require(rowsum > 0.0, "planetoid: node " + std::to_string(i) + " has no label");
        ds.y[i] = static_cast<int>(arg);
    }

    ds.g.n = n;
    std::vector<std::pair<int, int>> edges;
    for (const auto& [j, nbrs] : raw.graph) {
        require(j >= 0 && static_cast<std::size_t>(j) < n, "planetoid: graph node out of range");
        for (int k : nbrs) {
            require(k >= 0 && static_cast<std::size_t>(k) < n,
                    "planetoid: graph neighbor out of range");
            if (j == k) continue;
            edges.emplace_back(std::min(j, k), std::max(j, k));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    ds.g.edges = std::move(edges);

    ds.train_mask.assign(n, false);
    ds.val_mask.assign(n, false);
    ds.test_mask.assign(n, false);
    for (std::size_t i = 0; i < raw.y.rows(); ++i) ds.train_mask[i] = true;
    const std::size_t val_end = std::min(raw.y.rows() + 500, raw.allx.rows());
    for (std::size_t i = raw.y.rows(); i < val_end; ++i) ds.val_mask[i] = true;
    for (int idx : sorted_idx) ds.test_mask[static_cast<std::size_t>(idx)] = true;
    ds.validate();
    return ds;
}

inline NodeDataset convert_planetoid(const std::string& dir, const std::string& name) {
    return planetoid_to_dataset(load_planetoid_raw(dir, name));
}

}  // namespace sympgnn
