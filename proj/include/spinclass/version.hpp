#pragma once

#define SPINCLASS_VERSION "1.0.0"
