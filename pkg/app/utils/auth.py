import secrets
from typing import Optional

from fastapi import Header, HTTPException

from app.manager import settings_manager
from app.utils.logger import logger

BEARER_PREFIX = "Bearer "


def get_api_key() -> str:
    """设置中的 API Key（环境变量 DEJONG_API_KEY 优先）

    Raises:
        HTTPException: 没有配置 Key 时返回 500
    """
    api_key = settings_manager.api_key
    if not api_key:
        logger.error("设置中没有 API Key，拒绝全部请求")
        raise HTTPException(status_code=500, detail="API key not configured")
    return api_key


async def verify_api_key(authorization: Optional[str] = Header(None)) -> None:
    """所有 /v1 路由的依赖项，接受 "Bearer <key>" 或裸 key

    Raises:
        HTTPException: 缺少请求头或 key 不匹配时返回 401
    """
    if authorization is None:
        logger.warning("请求缺少 Authorization 头")
        raise HTTPException(status_code=401, detail="Missing Authorization header")

    presented = authorization.removeprefix(BEARER_PREFIX).strip()
    if not secrets.compare_digest(presented.encode(), get_api_key().encode()):
        logger.warning("API Key 不匹配")
        raise HTTPException(status_code=401, detail="Invalid API key")
    logger.debug("API Key 验证通过")
