#pragma once

#include "jcap/errors.hpp"
#include "jcap/specfun.hpp"
#include "jcap/quad.hpp"
#include "jcap/channels.hpp"
#include "jcap/jeffreys.hpp"
#include "jcap/constellation.hpp"
#include "jcap/mutual_info.hpp"
#include "jcap/receiver_quant.hpp"
#include "jcap/noniid.hpp"
#include "jcap/channel_io.hpp"
