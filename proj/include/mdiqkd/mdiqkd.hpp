#pragma once

// Key-rate security model for two phase-encoding measurement-device-
// independent QKD schemes with basis-dependent source flaws.

#include "mdiqkd/channel.hpp"
#include "mdiqkd/config.hpp"
#include "mdiqkd/fidelity.hpp"
#include "mdiqkd/presets.hpp"
#include "mdiqkd/report.hpp"
#include "mdiqkd/scenarios.hpp"
#include "mdiqkd/security.hpp"
#include "mdiqkd/states.hpp"
#include "mdiqkd/sweep.hpp"
