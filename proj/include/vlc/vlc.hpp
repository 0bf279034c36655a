// Umbrella header.
#pragma once

#include "vlc/channel.hpp"
#include "vlc/config.hpp"
#include "vlc/geometry.hpp"
#include "vlc/metrics.hpp"
#include "vlc/optimizer.hpp"
#include "vlc/partition.hpp"
#include "vlc/presets.hpp"
#include "vlc/protocol.hpp"
#include "vlc/reflection.hpp"
#include "vlc/scenarios.hpp"
