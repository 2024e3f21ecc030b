#pragma once

#include <array>

namespace neuromut {

// Bundled idiom list: 300 frequent identifiers and literals kept verbatim
// during abstraction. Users can override it with their own file.
inline constexpr std::array<const char*, 300> kDefaultIdioms = {
    "i", "j", "k", "n", "m", "x",
    "y", "z", "a", "b", "c", "d",
    "e", "f", "g", "h", "p", "q",
    "r", "s", "t", "u", "v", "w",
    "len", "length", "size", "count", "index", "idx",
    "pos", "position", "result", "res", "value", "val",
    "values", "key", "keys", "name", "names", "data",
    "buf", "buffer", "tmp", "temp", "obj", "item",
    "items", "list", "map", "set", "array", "arr",
    "args", "arg", "param", "params", "str", "string",
    "text", "line", "word", "token", "node", "next",
    "prev", "first", "last", "head", "tail", "cur",
    "current", "start", "end", "begin", "offset", "limit",
    "max", "min", "sum", "avg", "total", "num",
    "number", "flag", "found", "done", "ok", "err",
    "error", "msg", "message", "code", "status", "state",
    "type", "kind", "id", "uid", "ref", "src",
    "dst", "dest", "source", "target", "input", "output",
    "in", "out", "width", "height", "row", "col",
    "left", "right", "top", "bottom", "read", "write",
    "add", "remove", "clear", "contains", "equals", "hashCode",
    "toString", "compareTo", "clone", "close", "open", "init",
    "reset", "update", "append", "insert", "put", "push",
    "pop", "peek", "poll", "iterator", "hasNext", "charAt",
    "substring", "indexOf", "lastIndexOf", "startsWith", "endsWith", "trim",
    "split", "join", "replace", "matches", "format", "parse",
    "valueOf", "parseInt", "parseLong", "parseDouble", "isEmpty", "getName",
    "getValue", "getKey", "getId", "getSize", "getCount", "getType",
    "getClass", "println", "print", "printf", "log", "debug",
    "info", "warn", "sb", "it", "entry", "pair",
    "elem", "element", "child", "parent", "root", "level",
    "depth", "mask", "bits", "hash", "seed", "delta",
    "step", "factor", "scale", "rate", "ratio", "weight",
    "score", "rank", "other", "that", "self", "owner",
    "handler", "callback", "listener", "event", "action", "command",
    "request", "response", "query", "field", "method", "clazz",
    "instance", "context", "config", "options", "settings", "props",
    "visit", "accept", "apply", "run", "call", "execute",
    "process", "handle", "check", "test", "verify", "compare",
    "copyOf", "fill", "sort", "reverse", "shuffle", "swap",
    "String", "Object", "Integer", "Long", "Double", "Float",
    "Boolean", "Character", "Byte", "Short", "Number", "Math",
    "System", "List", "ArrayList", "LinkedList", "Map", "HashMap",
    "TreeMap", "Set", "HashSet", "TreeSet", "Collection", "Collections",
    "Arrays", "Iterator", "Iterable", "Exception", "RuntimeException", "IllegalArgumentException",
    "IllegalStateException", "NullPointerException", "IndexOutOfBoundsException", "UnsupportedOperationException", "IOException", "Throwable",
    "Thread", "Runnable", "Comparable", "Comparator", "StringBuilder", "StringBuffer",
    "CharSequence", "Optional", "File", "Pattern", "Matcher", "Random",
    "Scanner", "Locale", "Objects", "Entry", "Void", "Class",
    "MAX_VALUE", "MIN_VALUE", "TRUE", "FALSE", "EMPTY", "NULL",
};

}  // namespace neuromut
