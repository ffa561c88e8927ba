#pragma once

#include <stdexcept>
#include <string>

namespace stancebias {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// file missing / unreadable / unwritable
struct IoError : Error { using Error::Error; };

// required column or field absent, or a table has the wrong shape
struct SchemaError : Error { using Error::Error; };

// a single data row is invalid (message carries the row number)
struct RowError : Error { using Error::Error; };

struct BalanceError : Error { using Error::Error; };
struct JoinError : Error { using Error::Error; };

// token with no alphabetic content
struct TokenError : Error { using Error::Error; };

struct InputError : Error { using Error::Error; };
struct TableParseError : Error { using Error::Error; };
struct TableLoadError : Error { using Error::Error; };

// metric has no defined value on this view; callers must treat it as
// missing, never as zero
struct UndefinedMetricError : Error { using Error::Error; };

struct SamplingError : Error { using Error::Error; };
struct CacheError : Error { using Error::Error; };
struct BatchError : Error { using Error::Error; };
struct PlotError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace stancebias
