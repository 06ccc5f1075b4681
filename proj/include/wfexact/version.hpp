#pragma once

// Normally injected by the build; fallback for ad-hoc compilation.
#ifndef WFEXACT_VERSION
#define WFEXACT_VERSION "0.0.0-dev"
#endif
